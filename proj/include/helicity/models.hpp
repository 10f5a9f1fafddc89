#pragma once

// Energy closures and the constitutive quantities derived from them.
//
//   capillary:  W(rho, grad rho) = rho e(rho) + (lambda/2) |grad rho|^2
//   inertia:    W(rho, rho_dot)  = rho e(rho) - (mu(rho)/2) rho_dot^2
//   SGN:        W(h, h_dot)      = g h^2/2 - (h/6) h_dot^2
//
// with polytropic e(rho) = kappa rho^(gamma-1) / (gamma-1) and
// mu(rho) = mu0 rho^mu_exponent. rho_dot is the material derivative D rho/Dt.

#include <functional>
#include <variant>

#include "helicity/fields.hpp"

namespace helicity::models {

struct Polytropic {
  double kappa = 1;
  double gamma = 2;

  void validate() const;
  ScalarField specific_energy(const ScalarField& rho) const;
  /// rho e(rho)
  ScalarField volume_energy(const ScalarField& rho) const;
  /// d(rho e)/d rho
  ScalarField enthalpy(const ScalarField& rho) const;
  /// rho^2 e'(rho)
  ScalarField pressure(const ScalarField& rho) const;
  /// dP/drho
  ScalarField sound_speed_squared(const ScalarField& rho) const;
};

/// External potential V(t, x). Default-constructed potentials vanish.
class Potential {
 public:
  using Source = std::function<ScalarField(double)>;

  Potential() = default;
  static Potential field(ScalarField values);
  static Potential time_dependent(Source source);

  bool is_zero() const { return !source_ && values_.size() == 0; }
  bool depends_on_time() const { return static_cast<bool>(source_); }

  ScalarField value(double t, Index points) const;
  /// dV/dt, by a centered difference in time for time-dependent sources.
  ScalarField rate(double t, Index points) const;

 private:
  ScalarField values_;
  Source source_;
};

/// Which sign the SGN/inertia K-chain uses: K = u + grad(sigma)/rho (the
/// defining relation) or the flipped variant K = u - grad(sigma)/rho.
enum class KSign { Defining, Displayed };

struct CapillaryModel {
  Polytropic eos;
  double lambda = 0;
  Potential V;
};

struct InertiaModel {
  Polytropic eos;
  double mu0 = 0;
  double mu_exponent = 0;
  Potential V;
  KSign k_sign = KSign::Defining;

  ScalarField mu(const ScalarField& rho) const;
  ScalarField dmu(const ScalarField& rho) const;
};

struct SGNModel {
  double g = 9.81;
  KSign k_sign = KSign::Defining;
};

using Model = std::variant<CapillaryModel, InertiaModel, SGNModel>;

/// Model/grid contract: parameter ranges and SGN only on 2D grids.
void validate(const Model& model, const Grid& grid);

bool uses_K(const Model& model);

/// Throws PositivityError naming the first non-positive point.
void require_positive(const Grid& grid, const ScalarField& rho, const char* what);

/// Squared characteristic (sound or gravity-wave) speed.
ScalarField sound_speed_squared(const Model& model, const ScalarField& rho);

// ---------------------------------------------------------------------------
// Capillary fluids

ScalarField capillary_W(const Ops& ops, const CapillaryModel& m, const ScalarField& rho);

/// delta W / delta rho = e + rho e' - lambda Laplacian(rho)
ScalarField capillary_delta_W(const Ops& ops, const CapillaryModel& m, const ScalarField& rho);

struct PressureStress {
  ScalarField P;
  TensorField Pi;
};

/// P = rho dW/drho - W, Pi = P I + lambda grad rho (x) grad rho
PressureStress capillary_pressure_stress(const Ops& ops, const CapillaryModel& m,
                                         const ScalarField& rho);

/// Total generalized specific enthalpy H = delta W/delta rho + V.
ScalarField capillary_enthalpy(const Ops& ops, const CapillaryModel& m, const ScalarField& rho,
                               double t = 0);

/// du/dt = -(u . grad) u - grad H
VectorField capillary_momentum_rhs(const Ops& ops, const CapillaryModel& m,
                                   const ScalarField& rho, const VectorField& u, double t = 0);

/// rho |u|^2/2 + W + rho V
ScalarField capillary_energy(const Ops& ops, const CapillaryModel& m, const ScalarField& rho,
                             const VectorField& u, double t = 0);

// ---------------------------------------------------------------------------
// Fluids with internal inertia (the SGN overloads use the closed forms)

/// sigma = rho mu(rho) D rho/Dt with D rho/Dt = drho_dt + u . grad rho.
ScalarField inertia_sigma(const Ops& ops, const InertiaModel& m, const ScalarField& rho,
                          const VectorField& u, const ScalarField& drho_dt);
ScalarField inertia_sigma(const Ops& ops, const SGNModel& m, const ScalarField& h,
                          const VectorField& u, const ScalarField& dh_dt);

/// sigma with D rho/Dt eliminated through mass conservation: -mu rho^2 div u.
ScalarField inertia_sigma(const Ops& ops, const InertiaModel& m, const ScalarField& rho,
                          const VectorField& u);
ScalarField inertia_sigma(const Ops& ops, const SGNModel& m, const ScalarField& h,
                          const VectorField& u);

/// K = u + grad(sigma)/rho (sign flipped under KSign::Displayed).
VectorField inertia_K(const Ops& ops, const InertiaModel& m, const ScalarField& rho,
                      const VectorField& u, const ScalarField& sigma);
VectorField inertia_K(const Ops& ops, const SGNModel& m, const ScalarField& h,
                      const VectorField& u, const ScalarField& sigma);

/// Coefficient mu(rho) rho^2 of the velocity-recovery operator.
ScalarField inertia_stiffness(const InertiaModel& m, const ScalarField& rho);
ScalarField inertia_stiffness(const SGNModel& m, const ScalarField& h);

/// Legendre-transformed energy E~(rho, sigma).
ScalarField inertia_Etilde(const InertiaModel& m, const ScalarField& rho, const ScalarField& sigma);
ScalarField inertia_Etilde(const SGNModel& m, const ScalarField& h, const ScalarField& sigma);

/// dE~/drho at fixed sigma.
ScalarField inertia_Etilde_rho(const InertiaModel& m, const ScalarField& rho,
                               const ScalarField& sigma);
ScalarField inertia_Etilde_rho(const SGNModel& m, const ScalarField& h, const ScalarField& sigma);

/// The potential W(rho, rho_dot) with rho_dot recovered from sigma.
ScalarField inertia_W(const InertiaModel& m, const ScalarField& rho, const ScalarField& sigma);
ScalarField inertia_W(const SGNModel& m, const ScalarField& h, const ScalarField& sigma);

/// dK/dt = -(u . grad) K - (du/dx)^T K - grad(E~_rho + V - |u|^2/2)
VectorField inertia_momentum_K_rhs(const Ops& ops, const InertiaModel& m, const ScalarField& rho,
                                   const VectorField& u, const VectorField& K,
                                   const ScalarField& sigma, double t = 0);
VectorField inertia_momentum_K_rhs(const Ops& ops, const SGNModel& m, const ScalarField& h,
                                   const VectorField& u, const VectorField& K,
                                   const ScalarField& sigma, double t = 0);

/// delta W/delta rho = dW/drho - d/dt(dW/d rho_dot) - div(dW/d rho_dot u), with
/// dW/d rho_dot = -sigma/rho. Time derivatives of sigma and rho are supplied.
ScalarField inertia_delta_W(const Ops& ops, const InertiaModel& m, const ScalarField& rho,
                            const VectorField& u, const ScalarField& sigma,
                            const ScalarField& dsigma_dt, const ScalarField& drho_dt);
ScalarField inertia_delta_W(const Ops& ops, const SGNModel& m, const ScalarField& h,
                            const VectorField& u, const ScalarField& sigma,
                            const ScalarField& dsigma_dt, const ScalarField& dh_dt);

/// p = rho delta W/delta rho - W, with drho/dt from mass conservation.
ScalarField inertia_pressure(const Ops& ops, const InertiaModel& m, const ScalarField& rho,
                             const VectorField& u, const ScalarField& sigma,
                             const ScalarField& dsigma_dt);
ScalarField inertia_pressure(const Ops& ops, const SGNModel& m, const ScalarField& h,
                             const VectorField& u, const ScalarField& sigma,
                             const ScalarField& dsigma_dt);

/// rho |u|^2/2 + E~(rho, sigma) + rho V
ScalarField inertia_energy(const Ops& ops, const InertiaModel& m, const ScalarField& rho,
                           const VectorField& u, const ScalarField& sigma, double t = 0);
ScalarField inertia_energy(const Ops& ops, const SGNModel& m, const ScalarField& h,
                           const VectorField& u, const ScalarField& sigma, double t = 0);

/// External potential of any model at time t (zero for SGN).
ScalarField potential(const Model& model, double t, Index points);
ScalarField potential_rate(const Model& model, double t, Index points);

}  // namespace helicity::models
