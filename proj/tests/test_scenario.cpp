#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>

#include "helicity/diagnostics.hpp"
#include "helicity/scenario.hpp"

using namespace helicity;
using namespace helicity::scenario;
using nlohmann::json;

namespace {

json minimal_capillary() {
  return json::parse(R"({
    "grid": {"dim": 3, "n": 8},
    "model": {"type": "capillary"},
    "ic": {"rho": "1"},
    "stepper": {"t_end": 1}
  })");
}

std::string error_of(const json& doc) {
  try {
    from_json(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool mentions(const std::string& msg, const std::string& what) {
  return msg.find(what) != std::string::npos;
}

}  // namespace

TEST_CASE("minimal scenario gets the documented defaults") {
  const Scenario s = from_json(minimal_capillary());
  CHECK(s.grid.dim == 3);
  CHECK(s.grid.n[0] == 8);
  CHECK(s.grid.n[2] == 8);
  CHECK(s.grid.length[1] == doctest::Approx(2 * std::numbers::pi));
  CHECK(s.grid.backend == Backend::Spectral);
  CHECK_FALSE(s.grid.dealias);
  CHECK(s.model.kappa == 1);
  CHECK(s.model.gamma == 2);
  CHECK(s.model.lambda == 0);
  CHECK(s.model.V == "0");
  CHECK(s.ic.u == std::vector<std::string>{"0", "0", "0"});
  CHECK(s.ic.eta.empty());
  CHECK(s.stepper.cfl == 0.4);
  CHECK(std::isinf(s.stepper.dt_max));
  CHECK(s.stepper.elliptic_tol == 1e-10);
  CHECK(s.stepper.elliptic_max_iter == 200);
  CHECK(s.diagnostics.interval == doctest::Approx(0.1));
  CHECK(s.diagnostics.probe_fraction == 0.1);
  CHECK(s.output.dir == "output");
  CHECK_FALSE(s.output.snapshots);
  CHECK(s.seed == 0);
}

TEST_CASE("strict schema names the offending key") {
  json doc = minimal_capillary();
  doc["model"]["lamda"] = 0.01;
  CHECK(mentions(error_of(doc), "model.lamda"));

  doc = minimal_capillary();
  doc["extra"] = 1;
  CHECK(mentions(error_of(doc), "'extra'"));

  doc = minimal_capillary();
  doc["grid"].erase("n");
  CHECK(mentions(error_of(doc), "grid.n"));

  doc = minimal_capillary();
  doc["stepper"]["cfl"] = "fast";
  CHECK(mentions(error_of(doc), "stepper.cfl"));

  doc = minimal_capillary();
  doc["model"]["type"] = "superfluid";
  CHECK(mentions(error_of(doc), "unknown model"));

  doc = minimal_capillary();
  doc["ic"]["rho"] = "1 + ";
  CHECK(mentions(error_of(doc), "ic.rho"));

  doc = minimal_capillary();
  doc["ic"]["u"] = {"0", "x4", "0"};
  CHECK(mentions(error_of(doc), "ic.u[1]"));

  doc = minimal_capillary();
  doc["ic"]["u"] = {"0", "0"};
  CHECK(mentions(error_of(doc), "ic.u"));

  doc = minimal_capillary();
  doc["diagnostics"] = {{"interval", 0}};
  CHECK(mentions(error_of(doc), "diagnostics.interval"));

  doc = minimal_capillary();
  doc["model"]["gamma"] = 1;
  CHECK(mentions(error_of(doc), "model"));
}

TEST_CASE("sgn needs a 2D grid and h") {
  json doc = json::parse(R"({
    "grid": {"dim": 3, "n": 8},
    "model": {"type": "sgn"},
    "ic": {"h": "1"},
    "stepper": {"t_end": 1}
  })");
  CHECK(mentions(error_of(doc), "2D"));
  doc["grid"]["dim"] = 2;
  const Scenario s = from_json(doc);
  CHECK(s.model.type == "sgn");
  CHECK(s.ic.u.size() == 2);
  doc["ic"] = {{"rho", "1"}};
  CHECK(mentions(error_of(doc), "ic.rho"));
}

TEST_CASE("manifest round trip") {
  const json doc = json::parse(R"json({
    "grid": {"dim": 2, "n": [16, 8], "length": [6.0, 3.5], "backend": "fd4", "dealias": true},
    "model": {"type": "inertia", "kappa": 2, "gamma": 1.4, "mu0": 0.05, "mu_exponent": 1,
              "V": "g0*x2 + 0.1*sin(t)", "k_sign": "displayed"},
    "ic": {"params": {"a": 0.1, "g0": 9.8}, "rho": "1 + a*cos(x1)", "u": ["0.2", 0], "eta": "sin(x2)"},
    "stepper": {"cfl": 0.3, "dt_max": 0.01, "t_end": 0.5, "elliptic_tol": 1e-9, "elliptic_max_iter": 50},
    "diagnostics": {"interval": 0.125, "probe_fraction": 0.2},
    "output": {"dir": "out/x", "snapshots": true},
    "seed": 17
  })json");
  const Scenario s = from_json(doc);
  CHECK(s.grid.n[1] == 8);
  CHECK(s.ic.u[1] == "0");
  CHECK(s.model.k_sign == models::KSign::Displayed);
  const Scenario again = from_json(to_json(s));
  CHECK(again == s);
  CHECK(to_json(again) == to_json(s));
  const Scenario minimal = from_json(minimal_capillary());
  CHECK(from_json(to_json(minimal)) == minimal);
}

TEST_CASE("parse_scenario reads files and reports the path") {
  const auto dir = std::filesystem::temp_directory_path() / "helicity_test_scenario";
  std::filesystem::create_directories(dir);
  const auto good = dir / "good.json";
  std::ofstream(good) << minimal_capillary().dump();
  CHECK(parse_scenario(good) == from_json(minimal_capillary()));
  const auto broken = dir / "broken.json";
  std::ofstream(broken) << "{\"grid\": ";
  try {
    parse_scenario(broken);
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.what(), "broken.json"));
  }
  CHECK_THROWS_AS(parse_scenario(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("initial state from expressions") {
  json doc = minimal_capillary();
  doc["ic"] = {{"params", {{"a", 0.5}}}, {"rho", "1 + a*sin(x1)"}, {"u", {"cos(x2)", "0", "0"}}, {"eta", "x3"}};
  const Scenario s = from_json(doc);
  const Ops ops(s.grid);
  const auto model = build_model(s);
  const SimulationState st = build_initial_state(s, ops, model);
  const Grid& g = s.grid;
  for (Index p = 0; p < g.size(); p += 37) {
    CHECK(st.rho[p] == doctest::Approx(1 + 0.5 * std::sin(g.coordinate(0, p))));
    CHECK(st.vel(p, 0) == doctest::Approx(std::cos(g.coordinate(1, p))));
    CHECK((*st.eta)[p] == doctest::Approx(g.coordinate(2, p)));
  }
  CHECK(st.F.F.data().isApprox(TensorField::identity(g.size(), 3).data()));

  doc["ic"]["rho"] = "sin(x1)";
  CHECK_THROWS_AS(build_initial_state(from_json(doc), ops, model), PositivityError);
  doc["ic"]["rho"] = "1/x1";
  CHECK_THROWS_WITH_AS(build_initial_state(from_json(doc), ops, model), doctest::Contains("ic.rho"),
                       ConfigError);
}

TEST_CASE("inertia initial state stores K") {
  json doc = minimal_capillary();
  doc["model"] = {{"type", "inertia"}, {"mu0", 0.05}};
  doc["ic"] = {{"rho", "1 + 0.1*sin(x2)"}, {"u", {"sin(x1)", "0", "0"}}};
  const Scenario s = from_json(doc);
  const Ops ops(s.grid);
  const auto model = build_model(s);
  const SimulationState st = build_initial_state(s, ops, model);
  VectorField u = VectorField::Zero(s.grid.size(), 3);
  u.col(0) = coordinate_field(s.grid, 0).sin();
  // u = (sin x1, 0, 0): sigma = -mu rho^2 cos x1 and K = u + grad(sigma)/rho
  const ScalarField sigma = -0.05 * st.rho.square() * coordinate_field(s.grid, 0).cos();
  const VectorField K = u + ops.gradient(sigma).colwise() / st.rho;
  CHECK((st.vel - K).abs().maxCoeff() < 1e-12);
}

TEST_CASE("potentials") {
  json doc = minimal_capillary();
  doc["ic"]["params"] = {{"c", 2}};
  doc["model"]["V"] = "c*x1";
  Scenario s = from_json(doc);
  auto model = build_model(s);
  const auto& V = std::get<models::CapillaryModel>(model).V;
  CHECK_FALSE(V.depends_on_time());
  CHECK((V.value(0, s.grid.size()) - 2 * coordinate_field(s.grid, 0)).abs().maxCoeff() == 0);

  doc["model"]["V"] = "c*t";
  s = from_json(doc);
  model = build_model(s);
  const auto& Vt = std::get<models::CapillaryModel>(model).V;
  CHECK(Vt.depends_on_time());
  CHECK(Vt.value(1.5, s.grid.size())[0] == doctest::Approx(3));

  doc["model"]["V"] = "0";
  CHECK(std::get<models::CapillaryModel>(build_model(from_json(doc))).V.is_zero());

  doc["model"]["V"] = "q*x1";
  CHECK(mentions(error_of(doc), "model.V"));
}

TEST_CASE("refinement doubles every axis") {
  json doc = minimal_capillary();
  doc["grid"] = {{"dim", 2}, {"n", {8, 16}}};
  doc["ic"]["u"] = {"0", "0"};
  const Scenario s = from_json(doc);
  const Scenario r = refined(s, 2);
  CHECK(r.grid.n[0] == 32);
  CHECK(r.grid.n[1] == 64);
  CHECK(r.grid.length == s.grid.length);
  CHECK(r.stepper == s.stepper);
}
