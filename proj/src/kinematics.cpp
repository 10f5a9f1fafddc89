#include "helicity/kinematics.hpp"

#include <sstream>

#include "helicity/mutation.hpp"

namespace helicity::kinematics {

void require_orientation(const Grid& grid, const ScalarField& det, const char* what) {
  for (Index p = 0; p < det.size(); ++p) {
    if (!(det[p] > 0)) {
      std::ostringstream msg;
      msg << what << ": det F = " << det[p] << " at point (";
      for (int a = 0; a < grid.dim; ++a) msg << (a ? ", " : "") << grid.coordinate(a, p);
      msg << "); the motion is no longer invertible";
      throw SingularDeformationError(msg.str());
    }
  }
}

TensorField evolve_F_rhs(const Ops& ops, const TensorField& F, const VectorField& u) {
  require_orientation(ops.grid(), determinant(F), "evolve_F_rhs");
  return matmul(ops.jacobian(u), F) - ops.advect(u, F);
}

ScaledCofactorBasis scaled_cofactor(const Ops& ops, const TensorField& F) {
  const ScalarField det = determinant(F);
  require_orientation(ops.grid(), det, "scaled_cofactor");
  const ScalarField inv_det = det.inverse();
  ScaledCofactorBasis basis;
  const bool transposed = mutation::active(mutation::Defect::CofactorTranspose);
  for (int j = 0; j < F.dim(); ++j)
    basis.E.push_back((transposed ? F.row(j) : F.column(j)).colwise() * inv_det);
  return basis;
}

std::vector<VectorField> dual_basis(const Ops& ops, const TensorField& F) {
  require_orientation(ops.grid(), determinant(F), "dual_basis");
  const TensorField Finv = inverse(F);
  std::vector<VectorField> rows;
  for (int i = 0; i < F.dim(); ++i) rows.push_back(Finv.row(i));
  return rows;
}

ScalarField euler_jacobi_residual(const Ops& ops, const TensorField& F_prev,
                                  const TensorField& F_next, const VectorField& u, double dt) {
  if (!(dt > 0)) throw NumericalError("euler_jacobi_residual: dt must be positive");
  const ScalarField J0 = determinant(F_prev);
  const ScalarField J1 = determinant(F_next);
  require_orientation(ops.grid(), J0, "euler_jacobi_residual");
  require_orientation(ops.grid(), J1, "euler_jacobi_residual");
  const ScalarField Jmid = 0.5 * (J0 + J1);
  return (J1 - J0) / dt + ops.advect(u, Jmid) - Jmid * ops.divergence(u);
}

VectorField Ei_transport_rhs(const Ops& ops, const VectorField& E, const VectorField& u) {
  return matvec(ops.jacobian(u), E) - E.colwise() * ops.divergence(u) - ops.advect(u, E);
}

VectorField Ei_helmholtz_rhs(const Ops& ops, const VectorField& E, const VectorField& u) {
  if (ops.dim() == 2) return Ei_transport_rhs(ops, E, u);
  return -ops.curl(cross(E, u));
}

TensorField advance_deformation(const Ops& ops, const TensorField& F, const VectorField& u,
                                double dt) {
  auto rate = [&](const TensorField& G) { return ops.dealias(evolve_F_rhs(ops, G, u)); };
  const TensorField k1 = rate(F);
  const TensorField k2 = rate(F + (0.5 * dt) * k1);
  const TensorField k3 = rate(F + (0.5 * dt) * k2);
  const TensorField k4 = rate(F + dt * k3);
  return F + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace helicity::kinematics
