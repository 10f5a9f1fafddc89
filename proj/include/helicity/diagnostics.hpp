#pragma once

// Conserved integrals, flux-law residuals and the Lie-derivative checks.

#include <functional>
#include <string>
#include <vector>

#include "helicity/kinematics.hpp"
#include "helicity/models.hpp"
#include "helicity/state.hpp"

namespace helicity::diagnostics {

using models::Model;

struct DiagnosticsRecord {
  double t = 0;
  double mass = 0;
  double energy = 0;
  double helicity_omega = 0;  // integral of K . curl K; 0 in 2D
  std::vector<double> helicity_E;
  double ertel_range = 0;  // 0 without a passive scalar
  double res_divE = 0;
  double res_helmholtz = 0;
  double res_flux = 0;
  double res_euler_jacobi = 0;
  /// Accumulated integral of rho dV/dt; energy - energy_source is conserved.
  double energy_source = 0;
};

using WarningSink = std::function<void(const std::string&)>;

/// Writes to stderr.
void default_warning(const std::string& message);

/// Integral of K . L. Warns when ||div L|| exceeds 1e-6 ||L|| (sup norms).
double helicity(const Ops& ops, const VectorField& K, const VectorField& L,
                const WarningSink& warn = default_warning);

/// Omega = curl K. Planar (2D) flows have no such invariant; use the
/// covariant components K . E_i there.
VectorField generalized_vorticity(const Ops& ops, const VectorField& K);

/// G in the helicity flux: H = delta W/delta rho + V for capillary fluids,
/// E~_rho + V for the inertia family.
ScalarField flux_potential(const Ops& ops, const Model& model, const ResolvedState& s);

/// Pick the transported field L out of a state.
using FieldSelector = std::function<VectorField(const Ops&, const ResolvedState&)>;
FieldSelector select_vorticity();
FieldSelector select_basis(int i);

/// d(K.L)/dt + div((K.L) u + (G - |u|^2/2) L), time derivative centered over
/// the probes, flux at the sample.
ScalarField helicity_flux_residual(const Ops& ops, const Model& model, const ProbeTriple& p,
                                   const FieldSelector& L);

/// The same laws for all L = E_i at once, as d/dt(K^T F/det F) +
/// div((u K^T + (G - |u|^2/2) I) F/det F). Column i belongs to E_i.
VectorField compact_flux_residual(const Ops& ops, const Model& model, const ProbeTriple& p);

/// Pointwise defect of the identity behind the flux laws:
///   d(K.L)/dt + div((K.L) u + (G - |u|^2/2) L)
///     - L . (DK/Dt + (du/dx)^T K + grad(G - |u|^2/2))
///     - K . (dL/dt + (dL/dx) u + L div u - (du/dx) L)
/// for divergence-free L, with the time derivatives of K and L supplied.
ScalarField flux_identity_defect(const Ops& ops, const VectorField& K, const VectorField& L,
                                 const VectorField& u, const ScalarField& G,
                                 const VectorField& K_t, const VectorField& L_t);

/// Centered material derivative (q_next - q_prev)/delta + u . grad q_center.
ScalarField material_rate(const Ops& ops, const ScalarField& prev, const ScalarField& center,
                          const ScalarField& next, const VectorField& u, double delta);
VectorField material_rate(const Ops& ops, const VectorField& prev, const VectorField& center,
                          const VectorField& next, const VectorField& u, double delta);

/// One-form Lie derivative DC/Dt + (du/dx)^T C.
VectorField lie_d1(const Ops& ops, const VectorField& C, const VectorField& u,
                   const VectorField& DC_Dt);

/// Two-form Lie derivative Dw/Dt + w div u - (du/dx) w.
VectorField lie_d2(const Ops& ops, const VectorField& w, const VectorField& u,
                   const VectorField& Dw_Dt);

/// grad(eta) . L / rho
ScalarField ertel_quantity(const Ops& ops, const ScalarField& eta, const VectorField& L,
                           const ScalarField& rho);

/// K . E_i for each i.
std::vector<ScalarField> covariant_components(const Ops& ops, const VectorField& K,
                                              const kinematics::ScaledCofactorBasis& E);

struct Budgets {
  double mass = 0;
  double energy = 0;
};

Budgets budgets(const Ops& ops, const Model& model, const ResolvedState& s);

/// The record for the sample at p.center.
DiagnosticsRecord evaluate(const Ops& ops, const Model& model, const ProbeTriple& p,
                           const WarningSink& warn = default_warning);

}  // namespace helicity::diagnostics
