#include "helicity/models.hpp"

#include <cmath>
#include <sstream>

namespace helicity::models {

void Polytropic::validate() const {
  if (!(kappa > 0)) throw ConfigError("polytropic kappa must be positive");
  if (!(gamma > 1)) throw ConfigError("polytropic gamma must exceed 1");
}

ScalarField Polytropic::specific_energy(const ScalarField& rho) const {
  return kappa * rho.pow(gamma - 1) / (gamma - 1);
}

ScalarField Polytropic::volume_energy(const ScalarField& rho) const {
  return kappa * rho.pow(gamma) / (gamma - 1);
}

ScalarField Polytropic::enthalpy(const ScalarField& rho) const {
  return kappa * gamma * rho.pow(gamma - 1) / (gamma - 1);
}

ScalarField Polytropic::pressure(const ScalarField& rho) const { return kappa * rho.pow(gamma); }

ScalarField Polytropic::sound_speed_squared(const ScalarField& rho) const {
  return kappa * gamma * rho.pow(gamma - 1);
}

Potential Potential::field(ScalarField values) {
  Potential p;
  p.values_ = std::move(values);
  return p;
}

Potential Potential::time_dependent(Source source) {
  Potential p;
  p.source_ = std::move(source);
  return p;
}

ScalarField Potential::value(double t, Index points) const {
  if (source_) return source_(t);
  if (values_.size() == 0) return ScalarField::Zero(points);
  return values_;
}

ScalarField Potential::rate(double t, Index points) const {
  if (!source_) return ScalarField::Zero(points);
  const double dt = 1e-5 * std::max(1.0, std::abs(t));
  return (source_(t + dt) - source_(t - dt)) / (2 * dt);
}

ScalarField InertiaModel::mu(const ScalarField& rho) const {
  if (mu_exponent == 0) return ScalarField::Constant(rho.size(), mu0);
  return mu0 * rho.pow(mu_exponent);
}

ScalarField InertiaModel::dmu(const ScalarField& rho) const {
  if (mu_exponent == 0) return ScalarField::Zero(rho.size());
  return mu0 * mu_exponent * rho.pow(mu_exponent - 1);
}

void validate(const Model& model, const Grid& grid) {
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, CapillaryModel>) {
          m.eos.validate();
          if (!(m.lambda >= 0)) throw ConfigError("capillary lambda must be non-negative");
        } else if constexpr (std::is_same_v<M, InertiaModel>) {
          m.eos.validate();
          if (!(m.mu0 >= 0)) throw ConfigError("inertia mu0 must be non-negative");
        } else {
          if (!(m.g > 0)) throw ConfigError("SGN gravity g must be positive");
          if (grid.dim != 2) throw ConfigError("the SGN model operates on 2D grids only");
        }
      },
      model);
}

bool uses_K(const Model& model) { return !std::holds_alternative<CapillaryModel>(model); }

void require_positive(const Grid& grid, const ScalarField& rho, const char* what) {
  for (Index p = 0; p < rho.size(); ++p) {
    if (!(rho[p] > 0)) {
      std::ostringstream msg;
      msg << what << ": non-positive density " << rho[p] << " at point (";
      for (int a = 0; a < grid.dim; ++a) msg << (a ? ", " : "") << grid.coordinate(a, p);
      msg << ")";
      throw PositivityError(msg.str());
    }
  }
}

ScalarField sound_speed_squared(const Model& model, const ScalarField& rho) {
  return std::visit(
      [&](const auto& m) -> ScalarField {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SGNModel>)
          return m.g * rho;
        else
          return m.eos.sound_speed_squared(rho);
      },
      model);
}

ScalarField potential(const Model& model, double t, Index points) {
  if (auto* c = std::get_if<CapillaryModel>(&model)) return c->V.value(t, points);
  if (auto* i = std::get_if<InertiaModel>(&model)) return i->V.value(t, points);
  return ScalarField::Zero(points);
}

ScalarField potential_rate(const Model& model, double t, Index points) {
  if (auto* c = std::get_if<CapillaryModel>(&model)) return c->V.rate(t, points);
  if (auto* i = std::get_if<InertiaModel>(&model)) return i->V.rate(t, points);
  return ScalarField::Zero(points);
}

// ---------------------------------------------------------------------------
// Capillary

ScalarField capillary_W(const Ops& ops, const CapillaryModel& m, const ScalarField& rho) {
  require_positive(ops.grid(), rho, "capillary_W");
  const VectorField g = ops.gradient(rho);
  return m.eos.volume_energy(rho) + 0.5 * m.lambda * dot(g, g);
}

ScalarField capillary_delta_W(const Ops& ops, const CapillaryModel& m, const ScalarField& rho) {
  require_positive(ops.grid(), rho, "capillary_delta_W");
  ScalarField r = m.eos.enthalpy(rho);
  if (m.lambda != 0) r -= m.lambda * ops.laplacian(rho);
  return r;
}

PressureStress capillary_pressure_stress(const Ops& ops, const CapillaryModel& m,
                                         const ScalarField& rho) {
  const ScalarField P = rho * capillary_delta_W(ops, m, rho) - capillary_W(ops, m, rho);
  TensorField Pi = TensorField::identity(rho.size(), ops.dim());
  Pi.data().colwise() *= P;
  if (m.lambda != 0) {
    const VectorField g = ops.gradient(rho);
    Pi += m.lambda * outer(g, g);
  }
  return {P, Pi};
}

ScalarField capillary_enthalpy(const Ops& ops, const CapillaryModel& m, const ScalarField& rho,
                               double t) {
  return capillary_delta_W(ops, m, rho) + m.V.value(t, rho.size());
}

VectorField capillary_momentum_rhs(const Ops& ops, const CapillaryModel& m,
                                   const ScalarField& rho, const VectorField& u, double t) {
  return -ops.advect(u, u) - ops.gradient(capillary_enthalpy(ops, m, rho, t));
}

ScalarField capillary_energy(const Ops& ops, const CapillaryModel& m, const ScalarField& rho,
                             const VectorField& u, double t) {
  return 0.5 * rho * dot(u, u) + capillary_W(ops, m, rho) + rho * m.V.value(t, rho.size());
}

// ---------------------------------------------------------------------------
// Internal inertia

namespace {

// Everything the generic inertia formulas need from a closure.
struct Closure {
  ScalarField rhoe;
  ScalarField enthalpy;
  ScalarField mu;
  ScalarField dmu;
  KSign sign;
  const Potential* V;
};

Closure closure(const InertiaModel& m, const ScalarField& rho) {
  return {m.eos.volume_energy(rho), m.eos.enthalpy(rho), m.mu(rho), m.dmu(rho), m.k_sign, &m.V};
}

Closure closure(const SGNModel& m, const ScalarField& h) {
  return {0.5 * m.g * h.square(), m.g * h, h / 3.0, ScalarField::Constant(h.size(), 1.0 / 3.0),
          m.k_sign, nullptr};
}

ScalarField potential_of(const Closure& c, double t, Index points) {
  return c.V ? c.V->value(t, points) : ScalarField::Zero(points);
}

/// rho_dot recovered from sigma = rho mu rho_dot; zero where mu vanishes.
ScalarField rho_dot_from_sigma(const Closure& c, const ScalarField& rho, const ScalarField& sigma) {
  return (c.mu > 0).select(sigma / (c.mu * rho), ScalarField::Zero(rho.size()));
}

ScalarField generic_Etilde(const Closure& c, const ScalarField& rho, const ScalarField& sigma) {
  const ScalarField kinetic =
      (c.mu > 0).select(sigma.square() / (2 * c.mu * rho.square()), ScalarField::Zero(rho.size()));
  return c.rhoe + kinetic;
}

ScalarField generic_Etilde_rho(const Closure& c, const ScalarField& rho, const ScalarField& sigma) {
  const ScalarField s2 = sigma.square();
  const ScalarField extra = (c.mu > 0).select(
      -s2 * c.dmu / (2 * c.mu.square() * rho.square()) - s2 / (c.mu * rho.cube()),
      ScalarField::Zero(rho.size()));
  return c.enthalpy + extra;
}

ScalarField generic_W(const Closure& c, const ScalarField& rho, const ScalarField& sigma) {
  const ScalarField rd = rho_dot_from_sigma(c, rho, sigma);
  return c.rhoe - 0.5 * c.mu * rd.square();
}

ScalarField generic_sigma(const Ops& ops, const Closure& c, const ScalarField& rho,
                          const VectorField& u, const ScalarField& drho_dt) {
  const ScalarField rho_dot = drho_dt + ops.advect(u, rho);
  return rho * c.mu * rho_dot;
}

ScalarField generic_sigma_state(const Ops& ops, const Closure& c, const ScalarField& rho,
                                const VectorField& u) {
  return -c.mu * rho.square() * ops.divergence(u);
}

VectorField generic_K(const Ops& ops, const Closure& c, const ScalarField& rho,
                      const VectorField& u, const ScalarField& sigma) {
  const double s = c.sign == KSign::Defining ? 1.0 : -1.0;
  return u + s * (ops.gradient(sigma).colwise() / rho);
}

VectorField generic_K_rhs(const Ops& ops, const Closure& c, const ScalarField& rho,
                          const VectorField& u, const VectorField& K, const ScalarField& sigma,
                          double t) {
  const ScalarField potential = generic_Etilde_rho(c, rho, sigma) +
                                potential_of(c, t, rho.size()) - 0.5 * dot(u, u);
  return -ops.advect(u, K) - matvec_transposed(ops.jacobian(u), K) - ops.gradient(potential);
}

ScalarField generic_delta_W(const Ops& ops, const Closure& c, const ScalarField& rho,
                            const VectorField& u, const ScalarField& sigma,
                            const ScalarField& dsigma_dt, const ScalarField& drho_dt) {
  const ScalarField rd = rho_dot_from_sigma(c, rho, sigma);
  const ScalarField dW_drho = c.enthalpy - 0.5 * c.dmu * rd.square();
  // dW/d rho_dot = -sigma/rho
  const ScalarField d_dt = dsigma_dt / rho - sigma * drho_dt / rho.square();
  const ScalarField tau = sigma / rho;
  return dW_drho + d_dt + ops.divergence(u.colwise() * tau);
}

}  // namespace

#define HELICITY_INERTIA_OVERLOADS(ModelType)                                                   \
  ScalarField inertia_sigma(const Ops& ops, const ModelType& m, const ScalarField& rho,          \
                            const VectorField& u, const ScalarField& drho_dt) {                  \
    require_positive(ops.grid(), rho, "inertia_sigma");                                          \
    return generic_sigma(ops, closure(m, rho), rho, u, drho_dt);                                 \
  }                                                                                              \
  ScalarField inertia_sigma(const Ops& ops, const ModelType& m, const ScalarField& rho,          \
                            const VectorField& u) {                                              \
    require_positive(ops.grid(), rho, "inertia_sigma");                                          \
    return generic_sigma_state(ops, closure(m, rho), rho, u);                                    \
  }                                                                                              \
  VectorField inertia_K(const Ops& ops, const ModelType& m, const ScalarField& rho,              \
                        const VectorField& u, const ScalarField& sigma) {                        \
    require_positive(ops.grid(), rho, "inertia_K");                                              \
    return generic_K(ops, closure(m, rho), rho, u, sigma);                                       \
  }                                                                                              \
  VectorField inertia_momentum_K_rhs(const Ops& ops, const ModelType& m, const ScalarField& rho, \
                                     const VectorField& u, const VectorField& K,                 \
                                     const ScalarField& sigma, double t) {                       \
    require_positive(ops.grid(), rho, "inertia_momentum_K_rhs");                                 \
    return generic_K_rhs(ops, closure(m, rho), rho, u, K, sigma, t);                             \
  }                                                                                              \
  ScalarField inertia_delta_W(const Ops& ops, const ModelType& m, const ScalarField& rho,        \
                              const VectorField& u, const ScalarField& sigma,                    \
                              const ScalarField& dsigma_dt, const ScalarField& drho_dt) {        \
    require_positive(ops.grid(), rho, "inertia_delta_W");                                        \
    return generic_delta_W(ops, closure(m, rho), rho, u, sigma, dsigma_dt, drho_dt);             \
  }                                                                                              \
  ScalarField inertia_pressure(const Ops& ops, const ModelType& m, const ScalarField& rho,       \
                               const VectorField& u, const ScalarField& sigma,                   \
                               const ScalarField& dsigma_dt) {                                   \
    const ScalarField drho_dt = -ops.divergence(u.colwise() * rho);                              \
    return rho * inertia_delta_W(ops, m, rho, u, sigma, dsigma_dt, drho_dt) -                    \
           inertia_W(m, rho, sigma);                                                             \
  }                                                                                              \
  ScalarField inertia_energy(const Ops& ops, const ModelType& m, const ScalarField& rho,         \
                             const VectorField& u, const ScalarField& sigma, double t) {         \
    require_positive(ops.grid(), rho, "inertia_energy");                                         \
    const Closure c = closure(m, rho);                                                           \
    return 0.5 * rho * dot(u, u) + inertia_Etilde(m, rho, sigma) +                               \
           rho * potential_of(c, t, rho.size());                                                 \
  }

HELICITY_INERTIA_OVERLOADS(InertiaModel)
HELICITY_INERTIA_OVERLOADS(SGNModel)

#undef HELICITY_INERTIA_OVERLOADS

ScalarField inertia_stiffness(const InertiaModel& m, const ScalarField& rho) {
  return m.mu(rho) * rho.square();
}

ScalarField inertia_stiffness(const SGNModel&, const ScalarField& h) { return h.cube() / 3.0; }

ScalarField inertia_Etilde(const InertiaModel& m, const ScalarField& rho, const ScalarField& sigma) {
  return generic_Etilde(closure(m, rho), rho, sigma);
}

ScalarField inertia_Etilde_rho(const InertiaModel& m, const ScalarField& rho,
                               const ScalarField& sigma) {
  return generic_Etilde_rho(closure(m, rho), rho, sigma);
}

ScalarField inertia_W(const InertiaModel& m, const ScalarField& rho, const ScalarField& sigma) {
  return generic_W(closure(m, rho), rho, sigma);
}

// SGN closed forms: sigma = (h^2/3) Dh/Dt.

ScalarField inertia_Etilde(const SGNModel& m, const ScalarField& h, const ScalarField& sigma) {
  return 0.5 * m.g * h.square() + 9 * sigma.square() / (6 * h.cube());
}

ScalarField inertia_Etilde_rho(const SGNModel& m, const ScalarField& h, const ScalarField& sigma) {
  return m.g * h - 9 * sigma.square() / (2 * h.square().square());
}

ScalarField inertia_W(const SGNModel& m, const ScalarField& h, const ScalarField& sigma) {
  const ScalarField h_dot = 3 * sigma / h.square();
  return 0.5 * m.g * h.square() - h / 6.0 * h_dot.square();
}

}  // namespace helicity::models
