#include "helicity/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "helicity/dynamics.hpp"
#include "helicity/io.hpp"
#include "helicity/verify.hpp"

namespace helicity::commands {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

// Maps library errors onto exit codes; anything else propagates.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const io::IOError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const GridMismatchError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}

struct RunOutcome {
  dynamics::RunResult result;
  int dim = 3;
};

RunOutcome execute(const scenario::Scenario& sc, const fs::path& dir, Streams io) {
  const Ops ops(sc.grid);
  const models::Model model = scenario::build_model(sc);
  SimulationState initial = scenario::build_initial_state(sc, ops, model);
  RunOutcome outcome;
  outcome.dim = sc.grid.dim;
  outcome.result = dynamics::run(ops, model, std::move(initial), sc.stepper, sc.diagnostics);
  const auto& r = outcome.result;
  for (const auto& w : r.warnings) io.err << "warning: " << w << '\n';

  io::ensure_directory(dir);
  io::write_csv(dir / "diagnostics.csv", sc.grid.dim, r.records);

  json manifest = {{"scenario", scenario::to_json(sc)},
                   {"steps", r.steps},
                   {"rejected_steps", r.rejected_steps},
                   {"final_time", r.final_state.t},
                   {"records", r.records.size()},
                   {"status", r.ok() ? "completed" : "failed"},
                   {"warnings", r.warnings}};
  if (!r.ok()) manifest["failure"] = r.failure;
  if (models::uses_K(model))
    manifest["velocity_recovery"] = {{"worst_iterations", r.worst_recovery.iterations},
                                     {"worst_residual", r.worst_recovery.residual}};

  if (sc.output.snapshots) {
    const auto& s = r.final_state;
    const bool sgn = sc.model.type == "sgn";
    const std::string vel = models::uses_K(model) ? "K" : "u";
    std::vector<io::Snapshot> snaps;
    snaps.push_back({sc.grid, sgn ? "h" : "rho", s.t, s.rho});
    for (int a = 0; a < sc.grid.dim; ++a)
      snaps.push_back({sc.grid, vel + std::to_string(a + 1), s.t, s.vel.col(a)});
    snaps.push_back({sc.grid, "detF", s.t, determinant(s.F.F)});
    if (s.eta) snaps.push_back({sc.grid, "eta", s.t, *s.eta});
    json files = json::array();
    for (const auto& snap : snaps) {
      const std::string name = snap.field + ".snap";
      io::write_snapshot(dir / name, snap);
      files.push_back(name);
    }
    manifest["snapshots"] = files;
  }
  io::write_json(dir / "manifest.json", manifest);
  return outcome;
}

}  // namespace

int run_command(const fs::path& scenario_path, const std::optional<fs::path>& output, Streams io) {
  return guarded(io.err, [&] {
    const scenario::Scenario sc = scenario::parse_scenario(scenario_path);
    const fs::path dir = output ? *output : fs::path(sc.output.dir);
    const RunOutcome o = execute(sc, dir, io);
    const auto& r = o.result;
    io.out << "run: " << r.steps << " steps to t = " << r.final_state.t << ", " << r.records.size()
           << " records";
    if (r.rejected_steps) io.out << ", " << r.rejected_steps << " rejected step(s)";
    io.out << "\nwrote " << (dir / "diagnostics.csv").string() << '\n';
    if (!r.ok()) {
      io.err << "numerical failure: " << r.failure << '\n';
      return static_cast<int>(kNumerical);
    }
    return static_cast<int>(kOk);
  });
}

int verify_command(std::uint64_t seed, Backend backend, const std::optional<fs::path>& output,
                   Streams io, mutation::Defect defect) {
  return guarded(io.err, [&] {
    const mutation::Scope scope(defect);
    const verify::Report report = verify::run_suite({seed, backend});
    verify::print(io.out, report);
    if (output) {
      io::ensure_directory(*output);
      const fs::path path = *output / ("verify_" + to_string(backend) + ".txt");
      std::ofstream f(path);
      if (!f) throw io::IOError("cannot open " + path.string() + " for writing");
      verify::print(f, report);
      if (!f) throw io::IOError("write failed for " + path.string());
    }
    return static_cast<int>(report.passed() ? kOk : kVerification);
  });
}

std::vector<std::pair<std::string, double>> invariant_drifts(
    const std::vector<diagnostics::DiagnosticsRecord>& records, int dim) {
  using Getter = std::function<double(const diagnostics::DiagnosticsRecord&)>;
  std::vector<std::pair<std::string, Getter>> quantities = {
      {"mass", [](const auto& r) { return r.mass; }},
      {"energy", [](const auto& r) { return r.energy - r.energy_source; }}};
  if (dim == 3) quantities.push_back({"helicity_omega", [](const auto& r) { return r.helicity_omega; }});
  for (int i = 0; i < dim; ++i)
    quantities.push_back({"helicity_E" + std::to_string(i + 1),
                          [i](const auto& r) { return r.helicity_E.at(i); }});

  std::vector<std::pair<std::string, double>> out;
  for (const auto& [name, get] : quantities) {
    double drift = std::numeric_limits<double>::quiet_NaN();
    if (!records.empty()) {
      const double q0 = get(records.front());
      double worst = 0;
      for (const auto& r : records) worst = std::max(worst, std::abs(get(r) - q0));
      drift = worst / std::max(std::abs(q0), 1e-8);
    }
    out.emplace_back(name, drift);
  }
  return out;
}

std::string observed_order(double coarse, double fine) {
  if (!std::isfinite(coarse) || !std::isfinite(fine)) return "n/a";
  if (coarse <= kDriftFloor || fine <= kDriftFloor) return "n/a at floor";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", std::log2(coarse / fine));
  return buf;
}

int converge_command(const fs::path& scenario_path, int levels, const std::optional<fs::path>& output,
                     Streams io) {
  return guarded(io.err, [&] {
    if (levels < 2) throw ConfigError("converge needs --levels >= 2, got " + std::to_string(levels));
    const scenario::Scenario base = scenario::parse_scenario(scenario_path);
    const fs::path dir = output ? *output : fs::path(base.output.dir);

    std::vector<DriftRow> rows;
    std::vector<int> points;
    bool failed = false;
    for (int level = 0; level < levels; ++level) {
      const scenario::Scenario sc = scenario::refined(base, level);
      points.push_back(sc.grid.n[0]);
      std::vector<std::pair<std::string, double>> drifts;
      try {
        const RunOutcome o = execute(sc, dir / ("level" + std::to_string(level)), io);
        if (!o.result.ok()) {
          io.err << "level " << level << ": numerical failure: " << o.result.failure << '\n';
          failed = true;
        }
        drifts = invariant_drifts(o.result.records, sc.grid.dim);
      } catch (const NumericalError& e) {
        io.err << "level " << level << ": numerical failure: " << e.what() << '\n';
        failed = true;
        drifts = invariant_drifts({}, sc.grid.dim);
      }
      for (std::size_t q = 0; q < drifts.size(); ++q) {
        if (rows.size() <= q) rows.push_back({drifts[q].first, {}});
        rows[q].drift.push_back(drifts[q].second);
      }
      if (failed) break;
    }

    io::ensure_directory(dir);
    const fs::path csv_path = dir / "converge.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw io::IOError("cannot open " + csv_path.string() + " for writing");
    csv << "quantity,level,n,drift,order\n";

    std::ostringstream table;
    char cell[40];
    table << "quantity        ";
    for (int n : points) {
      std::snprintf(cell, sizeof cell, "  %-12s", ("n=" + std::to_string(n)).c_str());
      table << cell;
    }
    table << "  orders\n";
    for (const auto& row : rows) {
      char name[20];
      std::snprintf(name, sizeof name, "%-16s", row.quantity.c_str());
      table << name;
      std::string orders;
      for (std::size_t l = 0; l < row.drift.size(); ++l) {
        table << "  " << format(row.drift[l]);
        const std::string order = l ? observed_order(row.drift[l - 1], row.drift[l]) : "";
        if (l) orders += (l > 1 ? ", " : "") + order;
        char line[160];
        std::snprintf(line, sizeof line, "%s,%zu,%d,%.17g,%s\n", row.quantity.c_str(), l, points[l],
                      row.drift[l], order.c_str());
        csv << line;
      }
      table << "  " << orders << '\n';
    }
    if (!csv.flush()) throw io::IOError("write failed for " + csv_path.string());
    io.out << table.str() << "wrote " << csv_path.string() << '\n';
    return static_cast<int>(failed ? kNumerical : kOk);
  });
}

}  // namespace helicity::commands
