#include "helicity/diagnostics.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "helicity/mutation.hpp"

namespace helicity::diagnostics {

using namespace models;

void default_warning(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

double helicity(const Ops& ops, const VectorField& K, const VectorField& L,
                const WarningSink& warn) {
  if (K.rows() != L.rows() || K.cols() != L.cols())
    throw GridMismatchError("helicity: K and L live on different grids");
  const double div = sup_norm(ops.divergence(L));
  const double scale = sup_norm(L);
  // the absolute floor keeps roundoff on a vanishing L from warning
  if (warn && div > 1e-6 * scale && div > 1e-12) {
    std::ostringstream msg;
    msg << "helicity: L is not divergence free (|div L| = " << div << ", |L| = " << scale << ")";
    warn(msg.str());
  }
  return ops.integrate(dot(K, L));
}

VectorField generalized_vorticity(const Ops& ops, const VectorField& K) {
  if (ops.dim() != 3)
    throw ConfigError(
        "generalized vorticity is only meaningful in 3D; for planar flows the helicity is "
        "trivial, use the covariant components K . E_i instead");
  return ops.curl(K);
}

ScalarField flux_potential(const Ops& ops, const Model& model, const ResolvedState& s) {
  return std::visit(
      [&](const auto& m) -> ScalarField {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CapillaryModel>)
          return capillary_enthalpy(ops, m, s.rho, s.t);
        else
          return inertia_Etilde_rho(m, s.rho, s.sigma) + potential(model, s.t, s.rho.size());
      },
      model);
}

FieldSelector select_vorticity() {
  return [](const Ops& ops, const ResolvedState& s) { return generalized_vorticity(ops, s.K); };
}

FieldSelector select_basis(int i) {
  return [i](const Ops& ops, const ResolvedState& s) {
    return kinematics::scaled_cofactor(ops, s.F).E.at(i);
  };
}

ScalarField material_rate(const Ops& ops, const ScalarField& prev, const ScalarField& center,
                          const ScalarField& next, const VectorField& u, double delta) {
  return (next - prev) / delta + ops.advect(u, center);
}

VectorField material_rate(const Ops& ops, const VectorField& prev, const VectorField& center,
                          const VectorField& next, const VectorField& u, double delta) {
  return (next - prev) / delta + ops.advect(u, center);
}

namespace {

void check_triple(const ProbeTriple& p) {
  if (!(p.delta > 0)) throw NumericalError("probe spacing must be positive");
  if (p.prev.rho.size() != p.next.rho.size() || p.prev.rho.size() != p.center.rho.size())
    throw GridMismatchError("probe states live on different grids");
  if (!(p.prev.t < p.center.t && p.center.t < p.next.t))
    throw NumericalError("probe states are not ordered in time");
}

}  // namespace

ScalarField helicity_flux_residual(const Ops& ops, const Model& model, const ProbeTriple& p,
                                   const FieldSelector& select) {
  check_triple(p);
  const VectorField Lm = select(ops, p.prev), Lc = select(ops, p.center), Lp = select(ops, p.next);
  const ScalarField rate = (dot(p.next.K, Lp) - dot(p.prev.K, Lm)) / p.delta;
  const auto& c = p.center;
  const ScalarField weight = flux_potential(ops, model, c) - 0.5 * dot(c.u, c.u);
  const VectorField flux = c.u.colwise() * dot(c.K, Lc) + Lc.colwise() * weight;
  return rate + ops.divergence(flux);
}

VectorField compact_flux_residual(const Ops& ops, const Model& model, const ProbeTriple& p) {
  check_triple(p);
  const int dim = ops.dim();
  auto scaled = [](const TensorField& F) {
    TensorField S = F;
    S.data().colwise() /= determinant(F);
    return S;
  };
  const TensorField Sm = scaled(p.prev.F), Sc = scaled(p.center.F), Sp = scaled(p.next.F);
  const VectorField rate = (matvec_transposed(Sp, p.next.K) - matvec_transposed(Sm, p.prev.K)) /
                           p.delta;
  const auto& c = p.center;
  const ScalarField weight = flux_potential(ops, model, c) - 0.5 * dot(c.u, c.u);
  TensorField A = outer(c.u, c.K);
  for (int i = 0; i < dim; ++i) A(i, i) += weight;
  return rate + ops.tensor_divergence(matmul(A, Sc));
}

ScalarField flux_identity_defect(const Ops& ops, const VectorField& K, const VectorField& L,
                                 const VectorField& u, const ScalarField& G,
                                 const VectorField& K_t, const VectorField& L_t) {
  const ScalarField weight = G - 0.5 * dot(u, u);
  const double flux_sign = mutation::active(mutation::Defect::FluxSign) ? -1 : 1;
  const ScalarField lhs = dot(K_t, L) + dot(K, L_t) +
                          ops.divergence(flux_sign * (u.colwise() * dot(K, L)) + L.colwise() * weight);
  const TensorField du = ops.jacobian(u);
  const VectorField k_law = K_t + ops.advect(u, K) + matvec_transposed(du, K) + ops.gradient(weight);
  const VectorField l_law = L_t + ops.advect(u, L) + L.colwise() * ops.divergence(u) - matvec(du, L);
  return lhs - dot(L, k_law) - dot(K, l_law);
}

VectorField lie_d1(const Ops& ops, const VectorField& C, const VectorField& u,
                   const VectorField& DC_Dt) {
  if (C.rows() != u.rows() || DC_Dt.rows() != u.rows())
    throw GridMismatchError("lie_d1: fields live on different grids");
  const double sign = mutation::active(mutation::Defect::LieSign) ? -1 : 1;
  return DC_Dt + sign * matvec_transposed(ops.jacobian(u), C);
}

VectorField lie_d2(const Ops& ops, const VectorField& w, const VectorField& u,
                   const VectorField& Dw_Dt) {
  if (w.rows() != u.rows() || Dw_Dt.rows() != u.rows())
    throw GridMismatchError("lie_d2: fields live on different grids");
  const double sign = mutation::active(mutation::Defect::LieSign) ? -1 : 1;
  return Dw_Dt + w.colwise() * ops.divergence(u) - sign * matvec(ops.jacobian(u), w);
}

ScalarField ertel_quantity(const Ops& ops, const ScalarField& eta, const VectorField& L,
                           const ScalarField& rho) {
  require_positive(ops.grid(), rho, "ertel_quantity");
  return dot(ops.gradient(eta), L) / rho;
}

std::vector<ScalarField> covariant_components(const Ops& ops, const VectorField& K,
                                              const kinematics::ScaledCofactorBasis& E) {
  std::vector<ScalarField> out;
  for (const auto& Ei : E.E) {
    if (Ei.rows() != K.rows() || Ei.cols() != K.cols() || K.rows() != ops.size())
      throw GridMismatchError("covariant_components: fields live on different grids");
    out.push_back(dot(K, Ei));
  }
  return out;
}

Budgets budgets(const Ops& ops, const Model& model, const ResolvedState& s) {
  const ScalarField e = std::visit(
      [&](const auto& m) -> ScalarField {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CapillaryModel>)
          return capillary_energy(ops, m, s.rho, s.u, s.t);
        else
          return inertia_energy(ops, m, s.rho, s.u, s.sigma, s.t);
      },
      model);
  return {ops.integrate(s.rho), ops.integrate(e)};
}

DiagnosticsRecord evaluate(const Ops& ops, const Model& model, const ProbeTriple& p,
                           const WarningSink& warn) {
  check_triple(p);
  const auto& c = p.center;
  const int dim = ops.dim();
  DiagnosticsRecord rec;
  rec.t = c.t;
  const Budgets b = budgets(ops, model, c);
  rec.mass = b.mass;
  rec.energy = b.energy;

  const auto Em = kinematics::scaled_cofactor(ops, p.prev.F).E;
  const auto Ec = kinematics::scaled_cofactor(ops, c.F).E;
  const auto Ep = kinematics::scaled_cofactor(ops, p.next.F).E;

  // transported fields L: every E_i, plus curl K in 3D
  std::vector<VectorField> Lm(Em), Lc(Ec), Lp(Ep);
  if (dim == 3) {
    Lm.push_back(ops.curl(p.prev.K));
    Lc.push_back(ops.curl(c.K));
    Lp.push_back(ops.curl(p.next.K));
    rec.helicity_omega = helicity(ops, c.K, Lc.back(), warn);
  }
  for (int i = 0; i < dim; ++i) {
    rec.helicity_E.push_back(helicity(ops, c.K, Ec[i], warn));
    rec.res_divE = std::max(rec.res_divE, sup_norm(ops.divergence(Ec[i])));
  }

  const ScalarField weight = flux_potential(ops, model, c) - 0.5 * dot(c.u, c.u);
  for (std::size_t l = 0; l < Lc.size(); ++l) {
    const VectorField rate = material_rate(ops, Lm[l], Lc[l], Lp[l], c.u, p.delta);
    rec.res_helmholtz = std::max(rec.res_helmholtz, sup_norm(lie_d2(ops, Lc[l], c.u, rate)));
    const ScalarField density_rate = (dot(p.next.K, Lp[l]) - dot(p.prev.K, Lm[l])) / p.delta;
    const VectorField flux = c.u.colwise() * dot(c.K, Lc[l]) + Lc[l].colwise() * weight;
    rec.res_flux = std::max(rec.res_flux, sup_norm(ScalarField(density_rate + ops.divergence(flux))));
  }
  rec.res_euler_jacobi =
      sup_norm(kinematics::euler_jacobi_residual(ops, p.prev.F, p.next.F, c.u, p.delta));

  if (c.eta) {
    const VectorField& L = dim == 3 ? Lc.back() : Ec[0];
    const ScalarField q = ertel_quantity(ops, *c.eta, L, c.rho);
    rec.ertel_range = q.maxCoeff() - q.minCoeff();
  }
  return rec;
}

}  // namespace helicity::diagnostics
