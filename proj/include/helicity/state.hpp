#pragma once

#include <optional>

#include "helicity/fields.hpp"
#include "helicity/kinematics.hpp"

namespace helicity {

/// What the integrator advances. `vel` is u for capillary fluids and K for
/// the inertia family.
struct SimulationState {
  double t = 0;
  ScalarField rho;
  VectorField vel;
  kinematics::DeformationField F;
  std::optional<ScalarField> eta;
};

/// A state with the velocity pair and sigma made explicit.
struct ResolvedState {
  double t = 0;
  ScalarField rho;
  VectorField u;
  VectorField K;
  ScalarField sigma;
  TensorField F;
  std::optional<ScalarField> eta;
};

}  // namespace helicity

namespace helicity {

/// A sampled state and two probe states a half step `delta/2` on either side.
/// Time derivatives at the sample are centered differences over the probes.
struct ProbeTriple {
  ResolvedState prev, center, next;
  double delta = 0;
};

}  // namespace helicity
