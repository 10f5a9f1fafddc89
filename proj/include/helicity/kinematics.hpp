#pragma once

// Deformation-gradient transport and the divergence-free frame it carries.

#include <vector>

#include "helicity/fields.hpp"

namespace helicity::kinematics {

/// Deformation gradient F = dx/dX stored as an Eulerian field.
struct DeformationField {
  TensorField F;
  double initialized_at = 0;

  static DeformationField identity(const Grid& grid, double t0 = 0) {
    return {TensorField::identity(grid.size(), grid.dim), t0};
  }
};

/// Columns E_i of F / det F.
struct ScaledCofactorBasis {
  std::vector<VectorField> E;
};

/// Throws SingularDeformationError naming the first point where det F <= 0.
void require_orientation(const Grid& grid, const ScalarField& det, const char* what);

/// dF/dt = (du/dx) F - (u . grad) F
TensorField evolve_F_rhs(const Ops& ops, const TensorField& F, const VectorField& u);

ScaledCofactorBasis scaled_cofactor(const Ops& ops, const TensorField& F);

/// e^i = rows of F^{-1}; satisfies e^i . e_j = delta^i_j.
std::vector<VectorField> dual_basis(const Ops& ops, const TensorField& F);

/// (det F_next - det F_prev)/dt + u . grad(det F) - det F div u, with
/// det F taken at the midpoint of the pair.
ScalarField euler_jacobi_residual(const Ops& ops, const TensorField& F_prev,
                                  const TensorField& F_next, const VectorField& u, double dt);

/// Time derivative of a Helmholtz-transported field E. 3D: -curl(E x u).
/// 2D: (du/dx) E - (div u) E - (u . grad) E.
VectorField Ei_helmholtz_rhs(const Ops& ops, const VectorField& E, const VectorField& u);

/// The same rate written as (du/dx) E - (div u) E - (u . grad) E in any dimension.
VectorField Ei_transport_rhs(const Ops& ops, const VectorField& E, const VectorField& u);

/// One classical RK4 step of F in a frozen velocity field.
TensorField advance_deformation(const Ops& ops, const TensorField& F, const VectorField& u,
                                double dt);

}  // namespace helicity::kinematics
