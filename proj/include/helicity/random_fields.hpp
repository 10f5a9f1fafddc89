#pragma once

#include <random>

#include "helicity/fields.hpp"

namespace helicity {

/// Random trigonometric polynomial with integer wave vectors |k_a| <= kmax.
/// Deterministic for a given generator state.
inline ScalarField random_band_limited(const Grid& grid, std::mt19937_64& rng, int kmax,
                                       int terms = 6, double amplitude = 1.0) {
  std::uniform_int_distribution<int> wave(-kmax, kmax);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::array<ScalarField, 3> x;
  for (int a = 0; a < grid.dim; ++a) x[a] = coordinate_field(grid, a);
  ScalarField f = ScalarField::Zero(grid.size());
  for (int t = 0; t < terms; ++t) {
    ScalarField phase = ScalarField::Zero(grid.size());
    for (int a = 0; a < grid.dim; ++a) {
      const double k = 2 * std::numbers::pi * wave(rng) / grid.length[a];
      phase += k * x[a];
    }
    const double c = coef(rng), s = coef(rng);
    f += amplitude / terms * (c * phase.cos() + s * phase.sin());
  }
  return f;
}

inline VectorField random_band_limited_vector(const Grid& grid, std::mt19937_64& rng, int kmax,
                                              int terms = 6, double amplitude = 1.0) {
  VectorField v(grid.size(), grid.dim);
  for (int a = 0; a < grid.dim; ++a)
    v.col(a) = random_band_limited(grid, rng, kmax, terms, amplitude);
  return v;
}

}  // namespace helicity
