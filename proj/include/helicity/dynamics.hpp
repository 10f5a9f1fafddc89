#pragma once

// Time integration of (rho, u or K, F, eta) and velocity recovery for the
// inertia family.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "helicity/diagnostics.hpp"
#include "helicity/models.hpp"
#include "helicity/state.hpp"

namespace helicity::dynamics {

using models::Model;

struct StepperConfig {
  double cfl = 0.4;
  double dt_max = std::numeric_limits<double>::infinity();
  double t_end = 0;
  double elliptic_tol = 1e-10;
  int elliptic_max_iter = 200;

  void validate() const;
  bool operator==(const StepperConfig&) const = default;
};

struct RecoveryStats {
  int iterations = 0;
  double residual = 0;
};

/// Solve inertia_K(rho, u, sigma(u)) = K for u by preconditioned conjugate
/// gradients on rho u - grad(mu rho^2 div u) = rho K. The residual reported and
/// tested is ||K - inertia_K(u)|| / ||K||.
template <class M>
VectorField recover_velocity(const Ops& ops, const M& model, const ScalarField& rho,
                             const VectorField& K, double tol = 1e-10, int max_iter = 200,
                             RecoveryStats* stats = nullptr, const VectorField* guess = nullptr);

extern template VectorField recover_velocity(const Ops&, const models::InertiaModel&,
                                             const ScalarField&, const VectorField&, double, int,
                                             RecoveryStats*, const VectorField*);
extern template VectorField recover_velocity(const Ops&, const models::SGNModel&,
                                             const ScalarField&, const VectorField&, double, int,
                                             RecoveryStats*, const VectorField*);

/// Time derivatives of every state field.
struct Tendency {
  ScalarField rho;
  VectorField vel;
  TensorField F;
  std::optional<ScalarField> eta;
};

class Integrator {
 public:
  Integrator(const Ops& ops, Model model, StepperConfig config);

  const Ops& ops() const { return ops_; }
  const Model& model() const { return model_; }
  const StepperConfig& config() const { return config_; }

  /// u, K and sigma for a state (recovers u for the inertia family).
  ResolvedState resolve(const SimulationState& s) const;

  Tendency rhs(const SimulationState& s) const;

  /// One classical RK4 step. Positivity and orientation failures, in a stage
  /// or after the step, raise StepRejectedError.
  SimulationState rk4_step(const SimulationState& s, double dt) const;

  double cfl_dt(const SimulationState& s) const;

  /// Worst velocity-recovery statistics since construction.
  const RecoveryStats& worst_recovery() const { return worst_; }

 private:
  VectorField velocity(const SimulationState& s) const;
  Tendency rhs_with_velocity(const SimulationState& s, const VectorField& u) const;

  const Ops& ops_;
  Model model_;
  StepperConfig config_;
  mutable RecoveryStats worst_;
};

/// Validate a state against the grid: sizes, positivity, det F > 0.
void validate_state(const Ops& ops, const Model& model, const SimulationState& s);

struct DiagnosticsConfig {
  double interval = 0;  // 0: record only at t = 0 and t_end
  double probe_fraction = 0.1;
  bool operator==(const DiagnosticsConfig&) const = default;
};

struct RunResult {
  std::vector<diagnostics::DiagnosticsRecord> records;
  SimulationState final_state;
  RecoveryStats worst_recovery;
  long steps = 0;
  int rejected_steps = 0;
  std::string failure;  // empty on success
  std::vector<std::string> warnings;

  bool ok() const { return failure.empty(); }
};

using ProbeObserver = std::function<void(const ProbeTriple&)>;

/// Integrate to config.t_end, landing exactly on every sample time. Numerical
/// failures stop the run; the partial records and last good state are kept.
RunResult run(const Ops& ops, const Model& model, SimulationState initial,
              const StepperConfig& config, const DiagnosticsConfig& diag,
              const ProbeObserver& observer = {});

}  // namespace helicity::dynamics
