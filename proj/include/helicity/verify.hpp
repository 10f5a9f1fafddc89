#pragma once

// Built-in identity suite: calculus, deformation kinematics, the helicity flux
// identity, Lie derivatives and the variational derivatives, on randomized
// band-limited fields. Spectral checks compare sup-norms with fixed
// thresholds; finite-difference checks measure the refinement slope.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "helicity/fields.hpp"

namespace helicity::verify {

struct Check {
  std::string name;
  bool is_slope = false;  // measured is an observed order, else a sup-norm
  double measured = 0;
  double lower = 0;  // pass iff lower <= measured <= upper
  double upper = 0;
  bool passed = false;
};

struct Report {
  Backend backend = Backend::Spectral;
  std::uint64_t seed = 0;
  std::vector<Check> checks;

  bool passed() const;
};

struct Options {
  std::uint64_t seed = 0;
  Backend backend = Backend::Spectral;
};

Report run_suite(const Options& options);

void print(std::ostream& out, const Report& report);

/// Formal order of the backend's first derivative (spectral reports 0).
int operator_order(Backend backend);

}  // namespace helicity::verify
