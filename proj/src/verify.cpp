#include "helicity/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <random>

#include "helicity/diagnostics.hpp"
#include "helicity/kinematics.hpp"
#include "helicity/models.hpp"
#include "helicity/random_fields.hpp"

namespace helicity::verify {

namespace {

using Measure = std::function<double(const Ops&, std::mt19937_64&)>;

constexpr int kSpectralPoints = 32;
constexpr int kCoarsePoints = 32;  // finite-difference pair: 32 and 64
constexpr int kPairingPoints = 16;
constexpr double kSlopeBand = 0.2;

// An exact deformation gradient: the inverse of the Jacobian of x -> x + xi(x).
TensorField exact_deformation(const Ops& ops, std::mt19937_64& rng, double amp) {
  const VectorField xi = random_band_limited_vector(ops.grid(), rng, 1, 3, amp);
  return inverse(TensorField(ops.jacobian(xi) + TensorField::identity(ops.size(), ops.dim())));
}

VectorField smooth_vector(const Ops& ops, std::mt19937_64& rng, double amp = 1) {
  return random_band_limited_vector(ops.grid(), rng, 1, 4, amp);
}

ScalarField smooth_scalar(const Ops& ops, std::mt19937_64& rng, double amp = 1) {
  return random_band_limited(ops.grid(), rng, 1, 4, amp);
}

double div_curl(const Ops& ops, std::mt19937_64& rng) {
  return sup_norm(ops.divergence(ops.curl(random_band_limited_vector(ops.grid(), rng, 4))));
}

double curl_grad(const Ops& ops, std::mt19937_64& rng) {
  return sup_norm(ops.curl(ops.gradient(random_band_limited(ops.grid(), rng, 4))));
}

double piola(const Ops& ops, std::mt19937_64& rng) {
  const TensorField F = exact_deformation(ops, rng, 0.2);
  double worst = 0;
  for (const auto& E : kinematics::scaled_cofactor(ops, F).E)
    worst = std::max(worst, sup_norm(ops.divergence(E)));
  return worst;
}

double helmholtz_vs_transport(const Ops& ops, std::mt19937_64& rng) {
  const VectorField E = ops.curl(smooth_vector(ops, rng));
  const VectorField u = smooth_vector(ops, rng);
  return sup_norm(VectorField(kinematics::Ei_helmholtz_rhs(ops, E, u) -
                              kinematics::Ei_transport_rhs(ops, E, u)));
}

double cofactor_rate(const Ops& ops, std::mt19937_64& rng) {
  const TensorField F = exact_deformation(ops, rng, 0.2);
  const VectorField u = smooth_vector(ops, rng, 0.5);
  const double d = 1e-4;
  const auto Ep = kinematics::scaled_cofactor(ops, kinematics::advance_deformation(ops, F, u, d)).E;
  const auto Em = kinematics::scaled_cofactor(ops, kinematics::advance_deformation(ops, F, u, -d)).E;
  const auto E = kinematics::scaled_cofactor(ops, F).E;
  double worst = 0;
  for (int i = 0; i < ops.dim(); ++i) {
    const VectorField rate = (Ep[i] - Em[i]) / (2 * d);
    worst = std::max(worst, sup_norm(VectorField(rate - kinematics::Ei_transport_rhs(ops, E[i], u))));
  }
  return worst;
}

double dual_pairing(const Ops& ops, std::mt19937_64& rng) {
  const TensorField F = exact_deformation(ops, rng, 0.2);
  const auto dual = kinematics::dual_basis(ops, F);
  double worst = 0;
  for (int i = 0; i < ops.dim(); ++i)
    for (int j = 0; j < ops.dim(); ++j)
      worst = std::max(worst, sup_norm(ScalarField(dot(dual[i], F.column(j)) - (i == j ? 1.0 : 0.0))));
  return worst;
}

double cofactor_cross(const Ops& ops, std::mt19937_64& rng) {
  const TensorField F = exact_deformation(ops, rng, 0.2);
  const auto dual = kinematics::dual_basis(ops, F);
  const auto E = kinematics::scaled_cofactor(ops, F).E;
  double worst = 0;
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    worst = std::max(worst, sup_norm(VectorField(E[k] - cross(dual[i], dual[j]))));
  }
  return worst;
}

double flux_identity(const Ops& ops, std::mt19937_64& rng) {
  const VectorField K = smooth_vector(ops, rng);
  const VectorField L = ops.curl(smooth_vector(ops, rng));
  const VectorField u = smooth_vector(ops, rng);
  const ScalarField G = smooth_scalar(ops, rng);
  const VectorField K_t = smooth_vector(ops, rng);
  const VectorField L_t = smooth_vector(ops, rng);
  return sup_norm(diagnostics::flux_identity_defect(ops, K, L, u, G, K_t, L_t));
}

// grad(eta) for an advected eta satisfies d_L1 = 0
double lie_one_form(const Ops& ops, std::mt19937_64& rng) {
  const VectorField u = smooth_vector(ops, rng);
  const ScalarField eta = smooth_scalar(ops, rng);
  const VectorField grad = ops.gradient(eta);
  const VectorField Dgrad = ops.gradient(ScalarField(-ops.advect(u, eta))) + ops.advect(u, grad);
  return sup_norm(diagnostics::lie_d1(ops, grad, u, Dgrad));
}

// grad(a) x grad(b) for advected a, b satisfies d_L2 = 0
double lie_two_form(const Ops& ops, std::mt19937_64& rng) {
  const VectorField u = smooth_vector(ops, rng);
  const ScalarField a = smooth_scalar(ops, rng), b = smooth_scalar(ops, rng);
  const VectorField ga = ops.gradient(a), gb = ops.gradient(b);
  const VectorField w = cross(ga, gb);
  const VectorField w_t = cross(VectorField(ops.gradient(ScalarField(-ops.advect(u, a)))), gb) +
                          cross(ga, VectorField(ops.gradient(ScalarField(-ops.advect(u, b)))));
  return sup_norm(diagnostics::lie_d2(ops, w, u, VectorField(w_t + ops.advect(u, w))));
}

// Pairing of the variational derivative with a perturbation against central
// differences of the total potential, for eps = 1e-2, 1e-3, 1e-4.
struct PairingErrors {
  std::array<double, 3> err{};
  double pairing = 0;
};

PairingErrors pairing_errors(double pairing, const std::function<double(double)>& total) {
  PairingErrors r;
  r.pairing = pairing;
  const double eps[3] = {1e-2, 1e-3, 1e-4};
  for (int k = 0; k < 3; ++k) r.err[k] = std::abs((total(eps[k]) - total(-eps[k])) / (2 * eps[k]) - pairing);
  return r;
}

PairingErrors capillary_pairing(const Ops& ops, std::mt19937_64& rng) {
  const models::CapillaryModel m{{1, 1.4}, 0.1, {}};
  const ScalarField rho = 1.0 + random_band_limited(ops.grid(), rng, 2, 5, 0.2);
  const ScalarField drho = 0.5 + random_band_limited(ops.grid(), rng, 2);
  return pairing_errors(ops.integrate(models::capillary_delta_W(ops, m, rho) * drho), [&](double e) {
    return ops.integrate(models::capillary_W(ops, m, ScalarField(rho + e * drho)));
  });
}

// On a grid read as (x1, x2, t): u has no component along the time axis.
PairingErrors inertia_pairing(const Ops& ops, std::mt19937_64& rng) {
  models::InertiaModel m;
  m.eos = {1, 1.4};
  m.mu0 = 0.2;
  m.mu_exponent = 1;
  const ScalarField rho = 1.0 + random_band_limited(ops.grid(), rng, 2, 5, 0.2);
  VectorField u = random_band_limited_vector(ops.grid(), rng, 2, 4, 0.5);
  u.col(2).setZero();
  const ScalarField drho = 0.5 + random_band_limited(ops.grid(), rng, 2);
  auto sigma_of = [&](const ScalarField& r) { return models::inertia_sigma(ops, m, r, u, ops.diff(r, 2)); };
  const ScalarField sigma = sigma_of(rho);
  const ScalarField dW =
      models::inertia_delta_W(ops, m, rho, u, sigma, ops.diff(sigma, 2), ops.diff(rho, 2));
  return pairing_errors(ops.integrate(dW * drho), [&](double e) {
    const ScalarField r = rho + e * drho;
    return ops.integrate(models::inertia_W(m, r, sigma_of(r)));
  });
}

class Suite {
 public:
  Suite(const Options& o, Report& r) : opt_(o), report_(r) {}

  // Grid-independent checks hold to roundoff on every backend.
  void exact(const std::string& name, const Measure& m, double threshold) {
    std::mt19937_64 rng(opt_.seed);
    add({name, false, m(ops(kSpectralPoints), rng), 0, threshold});
  }

  // Discretization-limited checks: a threshold for spectral, a slope otherwise.
  void converging(const std::string& name, const Measure& m, double spectral_threshold) {
    if (opt_.backend == Backend::Spectral) {
      exact(name, m, spectral_threshold);
      return;
    }
    std::mt19937_64 coarse_rng(opt_.seed), fine_rng(opt_.seed);
    const double e0 = m(ops(kCoarsePoints), coarse_rng);
    const double e1 = m(ops(2 * kCoarsePoints), fine_rng);
    const double order = operator_order(opt_.backend);
    add({name, true, std::log2(e0 / e1), order - kSlopeBand, order + kSlopeBand});
  }

  // The variational oracles test the closures, not the stencils: a
  // finite-difference quotient rule is not exact, so they always run spectral.
  void pairing(const std::string& name, const std::function<PairingErrors(const Ops&, std::mt19937_64&)>& f) {
    std::mt19937_64 rng(opt_.seed);
    const Ops spectral(Grid::cube(3, kPairingPoints));
    const PairingErrors p = f(spectral, rng);
    for (int k = 0; k < 2; ++k)
      add({name + " slope " + std::to_string(k + 1), true, std::log10(p.err[k] / p.err[k + 1]), 1.9, 2.1});
    add({name + " agreement", false, p.err[2] / std::abs(p.pairing), 0, 1e-6});
  }

 private:
  const Ops& ops(int n) {
    auto& slot = grids_[n];
    if (!slot) {
      Grid g = Grid::cube(3, n, opt_.backend);
      g.dealias = opt_.backend == Backend::Spectral;
      slot = std::make_unique<Ops>(g);
    }
    return *slot;
  }

  void add(Check c) {
    c.passed = std::isfinite(c.measured) && c.lower <= c.measured && c.measured <= c.upper;
    report_.checks.push_back(c);
  }

  const Options& opt_;
  Report& report_;
  std::map<int, std::unique_ptr<Ops>> grids_;
};

}  // namespace

int operator_order(Backend backend) {
  switch (backend) {
    case Backend::FD2:
      return 2;
    case Backend::FD4:
      return 4;
    default:
      return 0;
  }
}

bool Report::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return !checks.empty();
}

Report run_suite(const Options& options) {
  Report report;
  report.backend = options.backend;
  report.seed = options.seed;
  Suite s(options, report);
  s.exact("calculus: div curl = 0", div_curl, 1e-11);
  s.exact("calculus: curl grad = 0", curl_grad, 1e-11);
  s.converging("deformation: div(F/det F) = 0", piola, 1e-10);
  s.converging("deformation: rate of F/det F", cofactor_rate, 1e-6);
  s.converging("deformation: Helmholtz form = transport form", helmholtz_vs_transport, 1e-10);
  s.exact("deformation: dual basis pairing", dual_pairing, 1e-12);
  s.exact("deformation: F/det F = dual cross products", cofactor_cross, 1e-12);
  s.converging("helicity: flux identity", flux_identity, 1e-8);
  s.converging("lie: one-form of an advected gradient", lie_one_form, 1e-10);
  s.converging("lie: two-form of advected gradients", lie_two_form, 1e-9);
  s.pairing("variational: capillary (spectral)", capillary_pairing);
  s.pairing("variational: inertia (spectral)", inertia_pairing);
  return report;
}

void print(std::ostream& out, const Report& report) {
  out << "identity suite, backend " << to_string(report.backend) << ", seed " << report.seed << '\n';
  char line[200];
  for (const auto& c : report.checks) {
    if (c.is_slope)
      std::snprintf(line, sizeof line, "%-4s %-48s slope %7.3f  (expected %.2f..%.2f)", c.passed ? "ok" : "FAIL",
                    c.name.c_str(), c.measured, c.lower, c.upper);
    else
      std::snprintf(line, sizeof line, "%-4s %-48s norm  %9.3e  (limit %.1e)", c.passed ? "ok" : "FAIL",
                    c.name.c_str(), c.measured, c.upper);
    out << line << '\n';
  }
  int failed = 0;
  for (const auto& c : report.checks) failed += !c.passed;
  out << (failed ? std::to_string(failed) + " check(s) failed" : "all checks passed") << '\n';
}

}  // namespace helicity::verify
