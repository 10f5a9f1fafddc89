#pragma once

// Scenario files: a strict JSON schema describing one simulation.
//
//   {
//     "grid":   {"dim": 3, "n": 32 | [nx, ny, nz], "length": L | [...],
//                "backend": "spectral" | "fd2" | "fd4", "dealias": false},
//     "model":  {"type": "capillary", "kappa": 1, "gamma": 2, "lambda": 0, "V": "0"}
//             | {"type": "inertia", "kappa", "gamma", "mu0", "mu_exponent", "V", "k_sign"}
//             | {"type": "sgn", "g": 9.81, "k_sign": "defining" | "displayed"},
//     "ic":     {"params": {...}, "rho" | "h": expr, "u": [expr, ...], "eta": expr},
//     "stepper": {"cfl", "dt_max", "t_end", "elliptic_tol", "elliptic_max_iter"},
//     "diagnostics": {"interval", "probe_fraction"},
//     "output": {"dir": "output", "snapshots": false},
//     "seed": 0
//   }
//
// Required: grid.dim, grid.n, model.type, ic.rho (ic.h for sgn), stepper.t_end.
// Unknown keys anywhere are errors.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "helicity/dynamics.hpp"
#include "helicity/expr.hpp"
#include "helicity/models.hpp"
#include "helicity/state.hpp"

namespace helicity::scenario {

struct ModelSpec {
  std::string type = "capillary";
  double kappa = 1;
  double gamma = 2;
  double lambda = 0;
  double mu0 = 0;
  double mu_exponent = 0;
  double g = 9.81;
  std::string V = "0";
  models::KSign k_sign = models::KSign::Defining;

  bool operator==(const ModelSpec&) const = default;
};

struct InitialCondition {
  expr::Params params;
  std::string rho;            // depth h for sgn
  std::vector<std::string> u;  // one per axis
  std::string eta;            // empty: no passive scalar

  bool operator==(const InitialCondition&) const = default;
};

struct OutputSpec {
  std::string dir = "output";
  bool snapshots = false;

  bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
  Grid grid;
  ModelSpec model;
  InitialCondition ic;
  dynamics::StepperConfig stepper;
  dynamics::DiagnosticsConfig diagnostics;
  OutputSpec output;
  std::uint64_t seed = 0;

  bool operator==(const Scenario&) const = default;
};

/// Validates and fills defaults. Errors name the offending key.
Scenario from_json(const nlohmann::json& doc);
Scenario parse_scenario(const std::filesystem::path& path);

/// The resolved scenario; from_json(to_json(s)) == s.
nlohmann::json to_json(const Scenario& s);

models::Model build_model(const Scenario& s);
SimulationState build_initial_state(const Scenario& s, const Ops& ops, const models::Model& model);

/// The same scenario with every grid axis refined by 2^level.
Scenario refined(const Scenario& s, int level);

}  // namespace helicity::scenario
