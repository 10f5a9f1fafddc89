#include "helicity/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace helicity::dynamics {

using namespace models;

void StepperConfig::validate() const {
  if (!(cfl > 0 && cfl <= 1)) throw ConfigError("stepper cfl must lie in (0, 1]");
  if (!(dt_max > 0)) throw ConfigError("stepper dt_max must be positive");
  if (!(t_end >= 0) || !std::isfinite(t_end)) throw ConfigError("stepper t_end must be >= 0");
  if (!(elliptic_tol > 0 && elliptic_tol < 1)) throw ConfigError("elliptic_tol must lie in (0, 1)");
  if (elliptic_max_iter < 1) throw ConfigError("elliptic_max_iter must be positive");
}

// ---------------------------------------------------------------------------
// Velocity recovery

namespace {

double inner(const VectorField& a, const VectorField& b) { return (a * b).sum(); }

/// Inverse of rho0 I + m0 s s^T, mode by mode. Exact for constant coefficients.
class ModalPreconditioner {
 public:
  ModalPreconditioner(const Ops& ops, double rho0, double m0) : ops_(ops), rho0_(rho0), m0_(m0) {
    const Grid& g = ops.grid();
    symbols_.resize(g.size(), g.dim);
    for (Index p = 0; p < g.size(); ++p) {
      auto idx = g.multi_index(p);
      for (int a = 0; a < g.dim; ++a) symbols_(p, a) = ops.symbol(a, idx[a]);
    }
  }

  VectorField apply(const VectorField& r) const {
    const int dim = ops_.dim();
    std::vector<Ops::Spectrum> c(dim);
    for (int a = 0; a < dim; ++a) c[a] = ops_.forward(r.col(a));
    const Index N = r.rows();
    for (Index p = 0; p < N; ++p) {
      std::complex<double> sc = 0;
      double s2 = 0;
      for (int a = 0; a < dim; ++a) {
        sc += symbols_(p, a) * c[a][p];
        s2 += symbols_(p, a) * symbols_(p, a);
      }
      const std::complex<double> w = m0_ * sc / (rho0_ + m0_ * s2);
      for (int a = 0; a < dim; ++a) c[a][p] = (c[a][p] - symbols_(p, a) * w) / rho0_;
    }
    VectorField z(N, dim);
    for (int a = 0; a < dim; ++a) z.col(a) = ops_.inverse(std::move(c[a]));
    return z;
  }

 private:
  const Ops& ops_;
  double rho0_, m0_;
  Eigen::ArrayXXd symbols_;
};

}  // namespace

template <class M>
VectorField recover_velocity(const Ops& ops, const M& model, const ScalarField& rho,
                             const VectorField& K, double tol, int max_iter, RecoveryStats* stats,
                             const VectorField* guess) {
  require_positive(ops.grid(), rho, "recover_velocity");
  require_finite(K, "recover_velocity");
  const ScalarField m = inertia_stiffness(model, rho);
  const double sign = model.k_sign == KSign::Defining ? 1.0 : -1.0;
  // rho K = rho u - sign grad(m div u)
  auto apply = [&](const VectorField& u) -> VectorField {
    return u.colwise() * rho - sign * ops.gradient(m * ops.divergence(u));
  };
  auto relative = [&](const VectorField& r, double knorm) {
    return std::sqrt((r.colwise() / rho).square().sum()) / knorm;
  };

  const double knorm = std::sqrt(K.square().sum());
  if (knorm == 0) {
    if (stats) *stats = {0, 0};
    return VectorField::Zero(K.rows(), K.cols());
  }
  ModalPreconditioner precond(ops, rho.mean(), std::abs(m.mean()));

  const VectorField b = K.colwise() * rho;
  VectorField u = guess ? *guess : K;
  VectorField r = b - apply(u);
  double res = relative(r, knorm);
  int it = 0;
  while (res > tol) {
    if (it >= max_iter) {
      if (stats) *stats = {it, res};
      throw ConvergenceError("velocity recovery did not converge in " + std::to_string(it) +
                                 " iterations (relative residual " + std::to_string(res) + ")",
                             it, res);
    }
    VectorField z = precond.apply(r);
    VectorField p = z;
    double rz = inner(r, z);
    while (it < max_iter) {
      ++it;
      const VectorField Ap = apply(p);
      const double pAp = inner(p, Ap);
      if (!(pAp > 0))
        throw IndefiniteOperatorError(
            "velocity recovery: the operator u -> u + grad(sigma)/rho is not positive definite "
            "for this state");
      const double alpha = rz / pAp;
      u += alpha * p;
      r -= alpha * Ap;
      if (relative(r, knorm) <= tol) break;
      z = precond.apply(r);
      const double rz_next = inner(r, z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
    // the recursively updated residual drifts; judge convergence on the true one
    r = b - apply(u);
    res = relative(r, knorm);
  }
  if (stats) *stats = {it, res};
  return u;
}

template VectorField recover_velocity(const Ops&, const InertiaModel&, const ScalarField&,
                                      const VectorField&, double, int, RecoveryStats*,
                                      const VectorField*);
template VectorField recover_velocity(const Ops&, const SGNModel&, const ScalarField&,
                                      const VectorField&, double, int, RecoveryStats*,
                                      const VectorField*);

// ---------------------------------------------------------------------------
// Integrator

void validate_state(const Ops& ops, const Model& model, const SimulationState& s) {
  const Grid& g = ops.grid();
  validate(model, g);
  if (s.rho.size() != g.size()) throw GridMismatchError("state density does not match the grid");
  if (s.vel.rows() != g.size() || s.vel.cols() != g.dim)
    throw GridMismatchError("state velocity does not match the grid");
  if (s.F.F.points() != g.size() || s.F.F.dim() != g.dim)
    throw GridMismatchError("state deformation gradient does not match the grid");
  if (s.eta && s.eta->size() != g.size())
    throw GridMismatchError("state passive scalar does not match the grid");
  require_finite(s.rho, "state density");
  require_finite(s.vel, "state velocity");
  require_finite(s.F.F.data(), "state deformation gradient");
  if (s.eta) require_finite(*s.eta, "state passive scalar");
  require_positive(g, s.rho, "state");
  kinematics::require_orientation(g, determinant(s.F.F), "state");
}

Integrator::Integrator(const Ops& ops, Model model, StepperConfig config)
    : ops_(ops), model_(std::move(model)), config_(config) {
  config_.validate();
  validate(model_, ops_.grid());
}

VectorField Integrator::velocity(const SimulationState& s) const {
  return std::visit(
      [&](const auto& m) -> VectorField {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CapillaryModel>) {
          return s.vel;
        } else {
          RecoveryStats stats;
          VectorField u = recover_velocity(ops_, m, s.rho, s.vel, config_.elliptic_tol,
                                           config_.elliptic_max_iter, &stats);
          worst_.iterations = std::max(worst_.iterations, stats.iterations);
          worst_.residual = std::max(worst_.residual, stats.residual);
          return u;
        }
      },
      model_);
}

ResolvedState Integrator::resolve(const SimulationState& s) const {
  ResolvedState r;
  r.t = s.t;
  r.rho = s.rho;
  r.F = s.F.F;
  r.eta = s.eta;
  r.u = velocity(s);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CapillaryModel>) {
          r.K = r.u;
          r.sigma = ScalarField::Zero(s.rho.size());
        } else {
          r.K = s.vel;
          r.sigma = inertia_sigma(ops_, m, s.rho, r.u);
        }
      },
      model_);
  return r;
}

Tendency Integrator::rhs_with_velocity(const SimulationState& s, const VectorField& u) const {
  Tendency d;
  d.rho = ops_.dealias(ScalarField(-ops_.divergence(u.colwise() * s.rho)));
  d.vel = std::visit(
      [&](const auto& m) -> VectorField {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CapillaryModel>) {
          return capillary_momentum_rhs(ops_, m, s.rho, u, s.t);
        } else {
          const ScalarField sigma = inertia_sigma(ops_, m, s.rho, u);
          return inertia_momentum_K_rhs(ops_, m, s.rho, u, s.vel, sigma, s.t);
        }
      },
      model_);
  d.vel = ops_.dealias(d.vel);
  d.F = ops_.dealias(kinematics::evolve_F_rhs(ops_, s.F.F, u));
  if (s.eta) d.eta = ops_.dealias(ScalarField(-ops_.advect(u, *s.eta)));
  return d;
}

Tendency Integrator::rhs(const SimulationState& s) const { return rhs_with_velocity(s, velocity(s)); }

namespace {

SimulationState shifted(const SimulationState& s, const Tendency& d, double h) {
  SimulationState r;
  r.t = s.t + h;
  r.rho = s.rho + h * d.rho;
  r.vel = s.vel + h * d.vel;
  r.F = {s.F.F + h * d.F, s.F.initialized_at};
  if (s.eta) r.eta = *s.eta + h * *d.eta;
  return r;
}

}  // namespace

SimulationState Integrator::rk4_step(const SimulationState& s, double dt) const {
  try {
    const Tendency k1 = rhs(s);
    const Tendency k2 = rhs(shifted(s, k1, 0.5 * dt));
    const Tendency k3 = rhs(shifted(s, k2, 0.5 * dt));
    const Tendency k4 = rhs(shifted(s, k3, dt));
    SimulationState r;
    r.t = s.t + dt;
    const double w = dt / 6.0;
    r.rho = s.rho + w * (k1.rho + 2 * k2.rho + 2 * k3.rho + k4.rho);
    r.vel = s.vel + w * (k1.vel + 2 * k2.vel + 2 * k3.vel + k4.vel);
    r.F = {s.F.F + w * (k1.F + 2.0 * k2.F + 2.0 * k3.F + k4.F), s.F.initialized_at};
    if (s.eta) r.eta = *s.eta + w * (*k1.eta + 2 * *k2.eta + 2 * *k3.eta + *k4.eta);
    require_finite(r.rho, "rk4_step density");
    require_finite(r.vel, "rk4_step velocity");
    require_positive(ops_.grid(), r.rho, "rk4_step");
    kinematics::require_orientation(ops_.grid(), determinant(r.F.F), "rk4_step");
    return r;
  } catch (const PositivityError& e) {
    throw StepRejectedError(std::string("step rejected: ") + e.what());
  } catch (const SingularDeformationError& e) {
    throw StepRejectedError(std::string("step rejected: ") + e.what());
  }
}

double Integrator::cfl_dt(const SimulationState& s) const {
  const VectorField u = velocity(s);
  const double dx = ops_.grid().min_spacing();
  const double umax = std::sqrt(u.square().rowwise().sum().maxCoeff());
  const double cmax = std::sqrt(sound_speed_squared(model_, s.rho).maxCoeff());
  double bound = dx / (umax + cmax);
  if (auto* cap = std::get_if<CapillaryModel>(&model_); cap && cap->lambda > 0) {
    // fastest capillary mode: omega = sqrt(lambda rho) k^2 with k = pi/dx;
    // RK4 is stable for |omega dt| <= 2.83 on the imaginary axis
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double dispersive = dx * dx * 2.83 / (pi2 * std::sqrt(cap->lambda * s.rho.maxCoeff()));
    bound = std::min(bound, dispersive);
  }
  return std::min(config_.cfl * bound, config_.dt_max);
}

// ---------------------------------------------------------------------------
// Run loop

RunResult run(const Ops& ops, const Model& model, SimulationState initial,
              const StepperConfig& config, const DiagnosticsConfig& diag,
              const ProbeObserver& observer) {
  validate_state(ops, model, initial);
  if (config.t_end < initial.t) throw ConfigError("t_end precedes the initial time");
  if (!(diag.interval >= 0)) throw ConfigError("diagnostics interval must be >= 0");
  if (!(diag.probe_fraction > 0 && diag.probe_fraction <= 1))
    throw ConfigError("diagnostics probe_fraction must lie in (0, 1]");

  Integrator integ(ops, model, config);
  RunResult result;
  std::set<std::string> seen;
  auto warn = [&](const std::string& msg) {
    if (seen.insert(msg).second && result.warnings.size() < 20) result.warnings.push_back(msg);
  };

  bool time_dependent_V = false;
  if (auto* c = std::get_if<CapillaryModel>(&model)) time_dependent_V = c->V.depends_on_time();
  if (auto* i = std::get_if<InertiaModel>(&model)) time_dependent_V = i->V.depends_on_time();
  auto source_density = [&](const SimulationState& s) {
    return ops.integrate(ScalarField(s.rho * potential_rate(model, s.t, s.rho.size())));
  };
  double energy_source = 0;

  auto record = [&](const SimulationState& s, double dt_hint) {
    const double delta = diag.probe_fraction * dt_hint;
    ProbeTriple p;
    p.delta = delta;
    p.prev = integ.resolve(integ.rk4_step(s, -0.5 * delta));
    p.next = integ.resolve(integ.rk4_step(s, 0.5 * delta));
    p.center = integ.resolve(s);
    auto rec = diagnostics::evaluate(ops, model, p, warn);
    rec.energy_source = energy_source;
    result.records.push_back(rec);
    if (observer) observer(p);
  };

  // sample times after the initial one
  std::vector<double> samples;
  if (diag.interval > 0)
    for (long k = 1;; ++k) {
      const double ts = initial.t + k * diag.interval;
      if (ts >= config.t_end - 1e-12 * std::max(1.0, std::abs(config.t_end))) break;
      samples.push_back(ts);
    }
  if (config.t_end > initial.t) samples.push_back(config.t_end);

  SimulationState s = std::move(initial);
  result.final_state = s;
  try {
    record(s, integ.cfl_dt(s));
    std::size_t next = 0;
    while (next < samples.size()) {
      const double target = samples[next];
      double dt = integ.cfl_dt(s);
      bool landing = false;
      if (s.t + dt >= target - 1e-12 * std::max(1.0, std::abs(target))) {
        dt = target - s.t;
        landing = true;
      }
      SimulationState n;
      try {
        n = integ.rk4_step(s, dt);
      } catch (const StepRejectedError&) {
        ++result.rejected_steps;
        dt *= 0.5;
        landing = false;
        n = integ.rk4_step(s, dt);  // a second rejection aborts the run
      }
      if (landing) n.t = target;
      if (time_dependent_V)
        energy_source += 0.5 * (n.t - s.t) * (source_density(s) + source_density(n));
      s = std::move(n);
      ++result.steps;
      result.final_state = s;
      if (landing) {
        record(s, integ.cfl_dt(s));
        ++next;
      }
    }
  } catch (const NumericalError& e) {
    result.failure = e.what();
  }
  result.worst_recovery = integ.worst_recovery();
  return result;
}

}  // namespace helicity::dynamics
