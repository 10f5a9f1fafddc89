#include "helicity/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace helicity::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw ConfigError("scenario key '" + key + "': " + msg);
}

// A JSON object with a fixed key set.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
    for (const auto& [key, value] : j_.items())
      if (!allowed.count(key)) fail(qualified(key), "unknown key");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& at(const std::string& key) const { return j_.at(key); }
  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void require(const std::string& key) const {
    if (!has(key)) fail(qualified(key), "missing required key");
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return as_number(at(key), qualified(key));
  }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    return as_integer(at(key), qualified(key));
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!at(key).is_boolean()) fail(qualified(key), "expected true or false");
    return at(key).get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!at(key).is_string()) fail(qualified(key), "expected a string");
    return at(key).get<std::string>();
  }

  static double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "expected a finite number");
    return x;
  }

  static long as_integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long>();
  }

 private:
  const json& j_;
  std::string path_;
};

// Expressions may be given as strings or plain numbers.
std::string expression(const json& v, const std::string& key, const std::set<std::string>* names) {
  std::string src;
  if (v.is_string())
    src = v.get<std::string>();
  else if (v.is_number())
    src = v.dump();
  else
    fail(key, "expected an expression string");
  try {
    const expr::Expr e = expr::parse_expression(src);
    if (names) expr::require_bound(e, *names);
  } catch (const ConfigError& e) {
    fail(key, e.what());
  }
  return src;
}

Grid parse_grid(const json& j) {
  Section s(j, "grid", {"dim", "n", "length", "backend", "dealias"});
  s.require("dim");
  s.require("n");
  Grid g;
  g.dim = static_cast<int>(s.integer("dim", 3));
  if (g.dim != 2 && g.dim != 3) fail("grid.dim", "must be 2 or 3");
  g.n = {1, 1, 1};

  auto per_axis = [&](const std::string& key, auto convert, auto& out) {
    const json& v = s.at(key);
    if (v.is_array()) {
      if (static_cast<int>(v.size()) != g.dim)
        fail(s.qualified(key), "expected " + std::to_string(g.dim) + " entries");
      for (int a = 0; a < g.dim; ++a) out[a] = convert(v[a], s.qualified(key));
    } else {
      const auto x = convert(v, s.qualified(key));
      for (int a = 0; a < g.dim; ++a) out[a] = x;
    }
  };
  per_axis("n", [](const json& v, const std::string& k) { return static_cast<int>(Section::as_integer(v, k)); },
           g.n);
  if (s.has("length"))
    per_axis("length", &Section::as_number, g.length);
  try {
    g.backend = backend_from_string(s.text("backend", "spectral"));
  } catch (const ConfigError& e) {
    fail("grid.backend", e.what());
  }
  g.dealias = s.boolean("dealias", false);
  try {
    g.validate();
  } catch (const ConfigError& e) {
    fail("grid", e.what());
  }
  return g;
}

models::KSign parse_sign(const Section& s) {
  const std::string v = s.text("k_sign", "defining");
  if (v == "defining") return models::KSign::Defining;
  if (v == "displayed") return models::KSign::Displayed;
  fail(s.qualified("k_sign"), "expected \"defining\" or \"displayed\", got \"" + v + "\"");
}

std::set<std::string> coordinate_names(int dim) {
  std::set<std::string> names;
  for (int a = 0; a < dim; ++a) names.insert("x" + std::to_string(a + 1));
  return names;
}

// V is checked for unbound names once the parameters are known.
ModelSpec parse_model(const json& j, int dim) {
  if (!j.is_object()) fail("model", "expected an object");
  if (!j.contains("type")) fail("model.type", "missing required key");
  if (!j.at("type").is_string()) fail("model.type", "expected a string");
  ModelSpec m;
  m.type = j.at("type").get<std::string>();
  if (m.type == "capillary") {
    Section s(j, "model", {"type", "kappa", "gamma", "lambda", "V"});
    m.kappa = s.number("kappa", m.kappa);
    m.gamma = s.number("gamma", m.gamma);
    m.lambda = s.number("lambda", m.lambda);
    if (s.has("V")) m.V = expression(s.at("V"), "model.V", nullptr);
  } else if (m.type == "inertia") {
    Section s(j, "model", {"type", "kappa", "gamma", "mu0", "mu_exponent", "V", "k_sign"});
    s.require("mu0");
    m.kappa = s.number("kappa", m.kappa);
    m.gamma = s.number("gamma", m.gamma);
    m.mu0 = s.number("mu0", m.mu0);
    m.mu_exponent = s.number("mu_exponent", m.mu_exponent);
    if (s.has("V")) m.V = expression(s.at("V"), "model.V", nullptr);
    m.k_sign = parse_sign(s);
  } else if (m.type == "sgn") {
    Section s(j, "model", {"type", "g", "k_sign"});
    if (dim != 2) fail("model.type", "the sgn model needs a 2D grid, got dim = " + std::to_string(dim));
    m.g = s.number("g", m.g);
    m.k_sign = parse_sign(s);
  } else {
    fail("model.type", "unknown model \"" + m.type + "\" (expected capillary, inertia or sgn)");
  }
  return m;
}

InitialCondition parse_ic(const json& j, const ModelSpec& model, int dim) {
  const bool sgn = model.type == "sgn";
  const std::string density = sgn ? "h" : "rho";
  Section s(j, "ic", {"params", density, "u", "eta"});
  s.require(density);
  InitialCondition ic;
  std::set<std::string> names = coordinate_names(dim);
  if (s.has("params")) {
    const json& p = s.at("params");
    if (!p.is_object()) fail("ic.params", "expected an object");
    for (const auto& [key, value] : p.items()) {
      const std::string q = "ic.params." + key;
      try {
        expr::parse_expression(key);
      } catch (const ConfigError&) {
        fail(q, "not a valid identifier");
      }
      if (names.count(key) || key == "t" || key == "pi") fail(q, "shadows a built-in name");
      ic.params[key] = Section::as_number(value, q);
      names.insert(key);
    }
  }
  ic.rho = expression(s.at(density), "ic." + density, &names);
  if (s.has("u")) {
    const json& u = s.at("u");
    if (!u.is_array() || static_cast<int>(u.size()) != dim)
      fail("ic.u", "expected an array of " + std::to_string(dim) + " expressions");
    for (int a = 0; a < dim; ++a)
      ic.u.push_back(expression(u[a], "ic.u[" + std::to_string(a) + "]", &names));
  } else {
    ic.u.assign(dim, "0");
  }
  if (s.has("eta")) ic.eta = expression(s.at("eta"), "ic.eta", &names);
  return ic;
}

models::Model make_model(const ModelSpec& m, models::Potential V) {
  const models::Polytropic eos{m.kappa, m.gamma};
  if (m.type == "capillary") return models::CapillaryModel{eos, m.lambda, std::move(V)};
  if (m.type == "inertia")
    return models::InertiaModel{eos, m.mu0, m.mu_exponent, std::move(V), m.k_sign};
  return models::SGNModel{m.g, m.k_sign};
}

}  // namespace

Scenario from_json(const json& doc) {
  Section top(doc, "", {"grid", "model", "ic", "stepper", "diagnostics", "output", "seed"});
  for (const char* key : {"grid", "model", "ic", "stepper"}) top.require(key);

  Scenario sc;
  sc.grid = parse_grid(doc.at("grid"));
  sc.model = parse_model(doc.at("model"), sc.grid.dim);
  sc.ic = parse_ic(doc.at("ic"), sc.model, sc.grid.dim);
  {
    std::set<std::string> names = coordinate_names(sc.grid.dim);
    names.insert("t");
    for (const auto& [k, v] : sc.ic.params) names.insert(k);
    expression(sc.model.V, "model.V", &names);
  }

  {
    Section s(doc.at("stepper"), "stepper",
              {"cfl", "dt_max", "t_end", "elliptic_tol", "elliptic_max_iter"});
    s.require("t_end");
    auto& c = sc.stepper;
    c.cfl = s.number("cfl", c.cfl);
    c.dt_max = s.number("dt_max", c.dt_max);
    c.t_end = s.number("t_end", c.t_end);
    c.elliptic_tol = s.number("elliptic_tol", c.elliptic_tol);
    c.elliptic_max_iter = static_cast<int>(s.integer("elliptic_max_iter", c.elliptic_max_iter));
    try {
      c.validate();
    } catch (const ConfigError& e) {
      fail("stepper", e.what());
    }
  }

  sc.diagnostics.interval = sc.stepper.t_end / 10;
  if (top.has("diagnostics")) {
    Section s(doc.at("diagnostics"), "diagnostics", {"interval", "probe_fraction"});
    sc.diagnostics.interval = s.number("interval", sc.diagnostics.interval);
    sc.diagnostics.probe_fraction = s.number("probe_fraction", sc.diagnostics.probe_fraction);
  }
  if (!(sc.diagnostics.interval > 0)) fail("diagnostics.interval", "must be positive");
  if (!(sc.diagnostics.probe_fraction > 0 && sc.diagnostics.probe_fraction <= 1))
    fail("diagnostics.probe_fraction", "must lie in (0, 1]");

  if (top.has("output")) {
    Section s(doc.at("output"), "output", {"dir", "snapshots"});
    sc.output.dir = s.text("dir", sc.output.dir);
    sc.output.snapshots = s.boolean("snapshots", sc.output.snapshots);
  }
  if (top.has("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long>() >= 0))
      fail("seed", "expected a non-negative integer");
    sc.seed = v.get<std::uint64_t>();
  }

  try {
    models::validate(make_model(sc.model, {}), sc.grid);
  } catch (const ConfigError& e) {
    fail("model", e.what());
  }
  return sc;
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return from_json(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json to_json(const Scenario& s) {
  json grid = {{"dim", s.grid.dim},
               {"n", json::array()},
               {"length", json::array()},
               {"backend", to_string(s.grid.backend)},
               {"dealias", s.grid.dealias}};
  for (int a = 0; a < s.grid.dim; ++a) {
    grid["n"].push_back(s.grid.n[a]);
    grid["length"].push_back(s.grid.length[a]);
  }

  const char* sign = s.model.k_sign == models::KSign::Defining ? "defining" : "displayed";
  json model = {{"type", s.model.type}};
  if (s.model.type == "sgn") {
    model["g"] = s.model.g;
    model["k_sign"] = sign;
  } else {
    model["kappa"] = s.model.kappa;
    model["gamma"] = s.model.gamma;
    model["V"] = s.model.V;
    if (s.model.type == "capillary") {
      model["lambda"] = s.model.lambda;
    } else {
      model["mu0"] = s.model.mu0;
      model["mu_exponent"] = s.model.mu_exponent;
      model["k_sign"] = sign;
    }
  }

  json ic = {{"params", json::object()}, {s.model.type == "sgn" ? "h" : "rho", s.ic.rho}, {"u", s.ic.u}};
  for (const auto& [k, v] : s.ic.params) ic["params"][k] = v;
  if (!s.ic.eta.empty()) ic["eta"] = s.ic.eta;

  json stepper = {{"cfl", s.stepper.cfl},
                  {"t_end", s.stepper.t_end},
                  {"elliptic_tol", s.stepper.elliptic_tol},
                  {"elliptic_max_iter", s.stepper.elliptic_max_iter}};
  if (std::isfinite(s.stepper.dt_max)) stepper["dt_max"] = s.stepper.dt_max;

  return {{"grid", grid},
          {"model", model},
          {"ic", ic},
          {"stepper", stepper},
          {"diagnostics",
           {{"interval", s.diagnostics.interval}, {"probe_fraction", s.diagnostics.probe_fraction}}},
          {"output", {{"dir", s.output.dir}, {"snapshots", s.output.snapshots}}},
          {"seed", s.seed}};
}

models::Model build_model(const Scenario& s) {
  models::Potential V;
  if (s.model.type != "sgn") {
    const expr::Expr e = expr::parse_expression(s.model.V);
    const Grid grid = s.grid;
    const expr::Params params = s.ic.params;
    auto sample = [e, grid, params](double t) {
      try {
        return expr::eval_on_grid(e, grid, params, t);
      } catch (const ConfigError& err) {
        throw ConfigError(std::string("model.V: ") + err.what());
      }
    };
    if (e.depends_on("t"))
      V = models::Potential::time_dependent(sample);
    else if (e.names().empty() && e.eval() == 0)
      V = models::Potential();
    else
      V = models::Potential::field(sample(0));
  }
  return make_model(s.model, std::move(V));
}

SimulationState build_initial_state(const Scenario& s, const Ops& ops, const models::Model& model) {
  if (!(ops.grid() == s.grid)) throw GridMismatchError("operators were built for another grid");
  auto field = [&](const std::string& src, const std::string& key) {
    try {
      return expr::eval_on_grid(expr::parse_expression(src), s.grid, s.ic.params, 0);
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  };

  SimulationState st;
  st.t = 0;
  st.rho = field(s.ic.rho, s.model.type == "sgn" ? "ic.h" : "ic.rho");
  VectorField u(s.grid.size(), s.grid.dim);
  for (int a = 0; a < s.grid.dim; ++a) u.col(a) = field(s.ic.u[a], "ic.u[" + std::to_string(a) + "]");
  models::require_positive(s.grid, st.rho, s.model.type == "sgn" ? "initial depth" : "initial density");

  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, models::CapillaryModel>)
          st.vel = u;
        else
          st.vel = models::inertia_K(ops, m, st.rho, u, models::inertia_sigma(ops, m, st.rho, u));
      },
      model);
  st.F = kinematics::DeformationField::identity(s.grid, 0);
  if (!s.ic.eta.empty()) st.eta = field(s.ic.eta, "ic.eta");
  return st;
}

Scenario refined(const Scenario& s, int level) {
  if (level < 0) throw ConfigError("refinement level must be >= 0");
  Scenario r = s;
  for (int a = 0; a < s.grid.dim; ++a) r.grid.n[a] = s.grid.n[a] << level;
  return r;
}

}  // namespace helicity::scenario
