#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helicity/models.hpp"
#include "helicity/random_fields.hpp"
#include "test_support.hpp"

using namespace helicity;
using namespace helicity::models;
using helicity::testing::constant_vector;
using helicity::testing::Coords;

namespace {

ScalarField positive_density(const Grid& g, std::mt19937_64& rng, double amp = 0.2) {
  return 1.0 + random_band_limited(g, rng, 2, 5, amp);
}

InertiaModel sgn_as_inertia(double g) {
  InertiaModel m;
  m.eos = {g / 2, 2};
  m.mu0 = 1.0 / 3.0;
  m.mu_exponent = 1;
  return m;
}

double slope(double e0, double e1, double ratio) { return std::log(e0 / e1) / std::log(ratio); }

}  // namespace

TEST_CASE("polytropic closure") {
  Polytropic eos{1.5, 1.4};
  ScalarField rho = ScalarField::LinSpaced(5, 0.5, 2.0);
  // d(rho e)/drho against a centered difference
  const double h = 1e-6;
  ScalarField fd = (eos.volume_energy(rho + h) - eos.volume_energy(rho - h)) / (2 * h);
  CHECK(sup_norm(ScalarField(fd - eos.enthalpy(rho))) < 1e-8);
  // P = rho^2 e'
  ScalarField de = (eos.specific_energy(rho + h) - eos.specific_energy(rho - h)) / (2 * h);
  CHECK(sup_norm(ScalarField(rho.square() * de - eos.pressure(rho))) < 1e-8);
  ScalarField dP = (eos.pressure(rho + h) - eos.pressure(rho - h)) / (2 * h);
  CHECK(sup_norm(ScalarField(dP - eos.sound_speed_squared(rho))) < 1e-7);
  CHECK_THROWS_AS((Polytropic{1, 1}).validate(), ConfigError);
  CHECK_THROWS_AS((Polytropic{0, 2}).validate(), ConfigError);
}

TEST_CASE("capillary delta W examples") {
  Ops ops(Grid::cube(3, 16));
  Coords x(ops.grid());
  CapillaryModel m{{1, 2}, 0.3, {}};
  const double rho0 = 1.7;
  ScalarField rho = ScalarField::Constant(ops.size(), rho0);
  // e + rho e' = 2 kappa rho for gamma = 2
  CHECK(sup_norm(ScalarField(capillary_delta_W(ops, m, rho) - 2 * rho0)) < 1e-12);

  const double a = 0.01;
  ScalarField wavy = rho0 + a * x.x1.sin();
  CapillaryModel flat = m;
  flat.lambda = 0;
  CHECK(sup_norm(ScalarField(capillary_delta_W(ops, flat, wavy) - m.eos.enthalpy(wavy))) < 1e-14);
  ScalarField extra = capillary_delta_W(ops, m, wavy) - capillary_delta_W(ops, flat, wavy);
  CHECK(sup_norm(ScalarField(extra - m.lambda * a * x.x1.sin())) < 1e-13);

  ScalarField bad = rho;
  bad[10] = 0;
  CHECK_THROWS_AS(capillary_delta_W(ops, m, bad), PositivityError);
}

TEST_CASE("capillary pressure and stress") {
  Ops ops(Grid::cube(3, 16));
  Coords x(ops.grid());
  CapillaryModel m{{0.8, 1.4}, 0.2, {}};
  const double rho0 = 1.3;
  ScalarField rho = ScalarField::Constant(ops.size(), rho0);
  auto [P, Pi] = capillary_pressure_stress(ops, m, rho);
  const double P0 = m.eos.pressure(ScalarField::Constant(1, rho0))[0];
  CHECK(sup_norm(ScalarField(P - P0)) < 1e-12);
  CHECK(sup_norm((Pi - P0 * TensorField::identity(ops.size(), 3)).data()) < 1e-12);

  const double a = 0.05;
  ScalarField wavy = rho0 + a * x.x1.sin();
  auto s = capillary_pressure_stress(ops, m, wavy);
  ScalarField cap = s.Pi(0, 0) - s.P;
  CHECK(sup_norm(ScalarField(cap - m.lambda * a * a * x.x1.cos().square())) < 1e-13);
  CHECK(sup_norm(ScalarField(s.Pi(1, 1) - s.P)) < 1e-13);
  CHECK(sup_norm(ScalarField(s.Pi(0, 1))) < 1e-13);

  CapillaryModel flat = m;
  flat.lambda = 0;
  auto b = capillary_pressure_stress(ops, flat, wavy);
  CHECK(sup_norm(ScalarField(b.P - flat.eos.pressure(wavy))) < 1e-13);
}

TEST_CASE("capillary momentum rhs") {
  Ops ops(Grid::cube(3, 16));
  Coords x(ops.grid());
  CapillaryModel m{{1, 2}, 0.01, {}};
  ScalarField rho = ScalarField::Constant(ops.size(), 1.0);
  VectorField zero = VectorField::Zero(ops.size(), 3);
  CHECK(sup_norm(capillary_momentum_rhs(ops, m, rho, zero)) == 0);

  // hydrostatic balance: V cancels the variation of delta W / delta rho
  ScalarField wavy = 1 + 0.1 * x.x2.cos() + 0.05 * x.x3.sin();
  m.V = Potential::field(3.0 - capillary_delta_W(ops, m, wavy));
  CHECK(sup_norm(capillary_momentum_rhs(ops, m, wavy, zero)) < 1e-12);
}

TEST_CASE("capillary momentum rhs agrees with the conservative form") {
  Ops ops(Grid::cube(3, 32));
  std::mt19937_64 rng(41);
  CapillaryModel m{{1, 2}, 0.05, {}};
  ScalarField rho = positive_density(ops.grid(), rng, 0.3);
  VectorField u = random_band_limited_vector(ops.grid(), rng, 2, 4, 0.5);
  m.V = Potential::field(random_band_limited(ops.grid(), rng, 2));

  // d(rho u)/dt + div(rho u (x) u + Pi) + rho grad V = 0 with d rho/dt = -div(rho u)
  auto [P, Pi] = capillary_pressure_stress(ops, m, rho);
  TensorField flux = outer(VectorField(u.colwise() * rho), u) + Pi;
  ScalarField rho_t = -ops.divergence(u.colwise() * rho);
  VectorField momentum_t =
      -ops.tensor_divergence(flux) - ops.gradient(m.V.value(0, ops.size())).colwise() * rho;
  VectorField u_t = (momentum_t - u.colwise() * rho_t).colwise() / rho;

  CHECK(sup_norm(VectorField(u_t - capillary_momentum_rhs(ops, m, rho, u))) < 1e-9);
}

TEST_CASE("capillary energy density") {
  Ops ops(Grid::cube(3, 8));
  CapillaryModel m{{2, 2}, 0.5, {}};
  const double rho0 = 1.5;
  ScalarField rho = ScalarField::Constant(ops.size(), rho0);
  VectorField zero = VectorField::Zero(ops.size(), 3);
  const double rhoe = 2 * rho0 * rho0;
  CHECK(capillary_energy(ops, m, rho, zero)[3] == doctest::Approx(rhoe));
  VectorField unit = constant_vector(ops.grid(), {0.6, 0.8, 0});
  CHECK(capillary_energy(ops, m, rho, unit)[3] == doctest::Approx(rho0 / 2 + rhoe));
  m.V = Potential::field(ScalarField::Constant(ops.size(), 0.7));
  CHECK(capillary_energy(ops, m, rho, zero)[3] == doctest::Approx(rhoe + rho0 * 0.7));
}

TEST_CASE("capillary variational derivative against the energy functional") {
  Ops ops(Grid::cube(3, 16));
  std::mt19937_64 rng(5);
  CapillaryModel m{{1, 1.4}, 0.1, {}};
  ScalarField rho = positive_density(ops.grid(), rng);
  // a mean component keeps the pairing well away from zero
  ScalarField drho = 0.5 + random_band_limited(ops.grid(), rng, 2);
  const double pairing = ops.integrate(capillary_delta_W(ops, m, rho) * drho);
  auto total = [&](const ScalarField& r) { return ops.integrate(capillary_W(ops, m, r)); };
  std::vector<double> err;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double fd = (total(rho + eps * drho) - total(rho - eps * drho)) / (2 * eps);
    err.push_back(std::abs(fd - pairing));
  }
  CHECK(slope(err[0], err[1], 10) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(slope(err[1], err[2], 10) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(err[2] / std::abs(pairing) < 1e-6);
}

TEST_CASE("inertia sigma and K examples") {
  Ops ops(Grid::cube(3, 16));
  Coords x(ops.grid());
  const Index N = ops.size();
  InertiaModel m;
  m.mu0 = 0.05;
  const double rho0 = 1.2, U = 0.3;
  ScalarField rho = ScalarField::Constant(N, rho0);
  VectorField u = VectorField::Zero(N, 3);
  u.col(0) = U * x.x1.sin();

  ScalarField sigma = inertia_sigma(ops, m, rho, u);
  CHECK(sup_norm(ScalarField(sigma + m.mu0 * rho0 * rho0 * U * x.x1.cos())) < 1e-13);
  // the explicit time derivative route gives the same sigma
  ScalarField rho_t = -ops.divergence(u.colwise() * rho);
  CHECK(sup_norm(ScalarField(inertia_sigma(ops, m, rho, u, rho_t) - sigma)) < 1e-13);

  VectorField K = inertia_K(ops, m, rho, u, sigma);
  CHECK(sup_norm(ScalarField(K.col(0) - U * (1 + m.mu0 * rho0) * x.x1.sin())) < 1e-13);
  CHECK(sup_norm(ScalarField(K.col(1))) < 1e-14);

  // steady solenoidal flow: sigma = 0 and K = u
  VectorField w = VectorField::Zero(N, 3);
  w.col(0) = x.x2.sin();
  CHECK(sup_norm(inertia_sigma(ops, m, rho, w)) < 1e-14);
  CHECK(sup_norm(VectorField(inertia_K(ops, m, rho, w, ScalarField::Constant(N, 2.0)) - w)) <
        1e-13);
}

TEST_CASE("SGN sigma, K and closed forms") {
  Ops ops(Grid::cube(2, 32));
  Coords x(ops.grid());
  const Index N = ops.size();
  SGNModel sgn{9.81};
  const double h0 = 1.3, U = 0.2, k = 2;
  ScalarField h = ScalarField::Constant(N, h0);
  VectorField u = VectorField::Zero(N, 2);
  u.col(0) = U * (k * x.x1).sin();

  ScalarField sigma = inertia_sigma(ops, sgn, h, u);
  CHECK(sup_norm(ScalarField(sigma + std::pow(h0, 3) / 3 * U * k * (k * x.x1).cos())) < 1e-12);
  VectorField K = inertia_K(ops, sgn, h, u, sigma);
  CHECK(sup_norm(ScalarField(K.col(0) - U * (1 + h0 * h0 * k * k / 3) * (k * x.x1).sin())) <
        1e-12);

  SGNModel displayed{9.81, KSign::Displayed};
  VectorField Kd = inertia_K(ops, displayed, h, u, sigma);
  CHECK(sup_norm(ScalarField(Kd.col(0) - U * (1 - h0 * h0 * k * k / 3) * (k * x.x1).sin())) <
        1e-12);

  ScalarField one = ScalarField::Ones(1);
  CHECK(inertia_Etilde_rho(sgn, one, one)[0] == doctest::Approx(5.31).epsilon(1e-14));
  CHECK(inertia_Etilde_rho(sgn, one, ScalarField::Zero(1))[0] == doctest::Approx(9.81));
  CHECK(inertia_Etilde(sgn, one, one)[0] == doctest::Approx(6.405).epsilon(1e-14));
  CHECK(inertia_energy(ops, sgn, ScalarField::Constant(N, 1.0), VectorField::Zero(N, 2),
                       ScalarField::Ones(N))[7] == doctest::Approx(6.405).epsilon(1e-14));
  CHECK(inertia_energy(ops, sgn, h, VectorField::Zero(N, 2), ScalarField::Zero(N))[0] ==
        doctest::Approx(9.81 * h0 * h0 / 2));

  // E~_h = g h - (Dh/Dt)^2 / 2 when sigma = (h^2/3) Dh/Dt
  std::mt19937_64 rng(2);
  ScalarField hh = positive_density(ops.grid(), rng);
  ScalarField hdot = random_band_limited(ops.grid(), rng, 3);
  ScalarField s = hh.square() / 3 * hdot;
  CHECK(sup_norm(ScalarField(inertia_Etilde_rho(sgn, hh, s) - (9.81 * hh - 0.5 * hdot.square()))) <
        1e-12);
}

TEST_CASE("SGN overloads reproduce the generic inertia family") {
  Ops ops(Grid::cube(2, 32));
  std::mt19937_64 rng(17);
  const double g = 9.81;
  SGNModel sgn{g};
  InertiaModel gen = sgn_as_inertia(g);
  ScalarField h = positive_density(ops.grid(), rng, 0.3);
  VectorField u = random_band_limited_vector(ops.grid(), rng, 3);
  ScalarField h_t = random_band_limited(ops.grid(), rng, 3);
  ScalarField s_t = random_band_limited(ops.grid(), rng, 3);

  ScalarField s1 = inertia_sigma(ops, sgn, h, u), s2 = inertia_sigma(ops, gen, h, u);
  CHECK(sup_norm(ScalarField(s1 - s2)) <= 1e-12 * (1 + sup_norm(s1)));
  // sigma = (h^2/3) Dh/Dt with Dh/Dt = -h div u
  CHECK(sup_norm(ScalarField(s1 + h.cube() / 3 * ops.divergence(u))) < 1e-12);
  CHECK(sup_norm(ScalarField(inertia_sigma(ops, sgn, h, u, h_t) - inertia_sigma(ops, gen, h, u, h_t))) <
        1e-12);
  CHECK(sup_norm(VectorField(inertia_K(ops, sgn, h, u, s1) - inertia_K(ops, gen, h, u, s1))) <
        1e-12);
  CHECK(sup_norm(ScalarField(inertia_Etilde(sgn, h, s1) - inertia_Etilde(gen, h, s1))) < 1e-12);
  CHECK(sup_norm(ScalarField(inertia_Etilde_rho(sgn, h, s1) - inertia_Etilde_rho(gen, h, s1))) <
        1e-12);
  CHECK(sup_norm(ScalarField(inertia_W(sgn, h, s1) - inertia_W(gen, h, s1))) < 1e-12);
  CHECK(sup_norm(ScalarField(inertia_stiffness(sgn, h) - inertia_stiffness(gen, h))) < 1e-14);
  CHECK(sup_norm(ScalarField(inertia_delta_W(ops, sgn, h, u, s1, s_t, h_t) -
                             inertia_delta_W(ops, gen, h, u, s1, s_t, h_t))) < 1e-11);
  CHECK(sup_norm(ScalarField(sound_speed_squared(Model(sgn), h) - g * h)) < 1e-13);
}

TEST_CASE("Legendre transform consistency") {
  std::mt19937_64 rng(23);
  Grid g = Grid::cube(3, 8);
  for (double exponent : {0.0, 1.0, -0.5}) {
    InertiaModel m;
    m.eos = {1.2, 1.4};
    m.mu0 = 0.3;
    m.mu_exponent = exponent;
    ScalarField rho = positive_density(g, rng, 0.4);
    ScalarField sigma = random_band_limited(g, rng, 2);
    // E = W + tau rho_dot, tau = sigma / rho, rho_dot = sigma / (mu rho)
    ScalarField rho_dot = sigma / (m.mu(rho) * rho);
    ScalarField E = inertia_W(m, rho, sigma) + sigma / rho * rho_dot;
    CHECK(sup_norm(ScalarField(E - inertia_Etilde(m, rho, sigma))) < 1e-12);
    // tau = -dW/d rho_dot
    ScalarField dW = -m.mu(rho) * rho_dot;
    CHECK(sup_norm(ScalarField(-dW - sigma / rho)) < 1e-12);
    // dE~/drho at fixed sigma
    const double h = 1e-6;
    ScalarField fd = (inertia_Etilde(m, rho + h, sigma) - inertia_Etilde(m, rho - h, sigma)) / (2 * h);
    CHECK(sup_norm(ScalarField(fd - inertia_Etilde_rho(m, rho, sigma))) < 1e-7);
  }
}

TEST_CASE("inertia variational derivative against the space-time functional") {
  // axes (x1, x2, t); u has no component along the time axis
  Ops ops(Grid::cube(3, 32));
  std::mt19937_64 rng(31);
  InertiaModel m;
  m.eos = {1, 1.4};
  m.mu0 = 0.2;
  m.mu_exponent = 1;
  ScalarField rho = positive_density(ops.grid(), rng, 0.2);
  VectorField u = random_band_limited_vector(ops.grid(), rng, 2, 4, 0.5);
  u.col(2).setZero();
  // a mean component keeps the pairing well away from zero
  ScalarField drho = 0.5 + random_band_limited(ops.grid(), rng, 2);

  auto sigma_of = [&](const ScalarField& r) {
    return inertia_sigma(ops, m, r, u, ops.diff(r, 2));
  };
  auto total = [&](const ScalarField& r) { return ops.integrate(inertia_W(m, r, sigma_of(r))); };
  ScalarField sigma = sigma_of(rho);
  ScalarField dW = inertia_delta_W(ops, m, rho, u, sigma, ops.diff(sigma, 2), ops.diff(rho, 2));
  const double pairing = ops.integrate(dW * drho);
  std::vector<double> err;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double fd = (total(rho + eps * drho) - total(rho - eps * drho)) / (2 * eps);
    err.push_back(std::abs(fd - pairing));
  }
  CHECK(slope(err[0], err[1], 10) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(slope(err[1], err[2], 10) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(err[2] / std::abs(pairing) < 1e-6);
}

TEST_CASE("K-form momentum agrees with the conservative inertia law") {
  // The conservative law carries d sigma/dt through the pressure; the K-form
  // carries it through dK/dt. Their difference must not depend on it.
  auto check = [](const Ops& ops, const auto& model, std::mt19937_64& rng) {
    ScalarField rho = positive_density(ops.grid(), rng, 0.15);
    VectorField u = random_band_limited_vector(ops.grid(), rng, 1, 4, 0.3);
    ScalarField sigma = inertia_sigma(ops, model, rho, u);
    VectorField K = inertia_K(ops, model, rho, u, sigma);
    VectorField K_t = inertia_momentum_K_rhs(ops, model, rho, u, K, sigma);
    ScalarField rho_t = -ops.divergence(u.colwise() * rho);
    for (int trial = 0; trial < 2; ++trial) {
      ScalarField sigma_t = random_band_limited(ops.grid(), rng, 2);
      ScalarField p = inertia_pressure(ops, model, rho, u, sigma, sigma_t);
      TensorField flux = outer(VectorField(u.colwise() * rho), u);
      VectorField momentum_t = -ops.tensor_divergence(flux) - ops.gradient(p);
      VectorField u_t_cons = (momentum_t - u.colwise() * rho_t).colwise() / rho;
      // K = u + grad(sigma)/rho differentiated in time
      VectorField u_t_K = K_t - ops.gradient(sigma_t).colwise() / rho +
                          ops.gradient(sigma).colwise() * (rho_t / rho.square());
      CHECK(sup_norm(VectorField(u_t_cons - u_t_K)) < 1e-8);
    }
  };
  std::mt19937_64 rng(77);
  Ops ops(Grid::cube(2, 64));
  InertiaModel m;
  m.eos = {1, 2};
  m.mu0 = 0.05;
  check(ops, m, rng);
  m.mu_exponent = 1.5;
  m.eos.gamma = 1.4;
  check(ops, m, rng);
  check(ops, SGNModel{1.0}, rng);
}

TEST_CASE("Galilean invariance of the momentum tendencies") {
  Ops ops(Grid::cube(3, 32));
  std::mt19937_64 rng(8);
  ScalarField rho = positive_density(ops.grid(), rng);
  VectorField u = random_band_limited_vector(ops.grid(), rng, 2, 4, 0.5);
  VectorField U = constant_vector(ops.grid(), {0.7, -0.3, 1.1});

  // in a frame moving with -U the fields are translated: d/dt picks up -(U . grad)
  CapillaryModel cap{{1, 1.4}, 0.05, {}};
  VectorField a0 = capillary_momentum_rhs(ops, cap, rho, u);
  VectorField a1 = capillary_momentum_rhs(ops, cap, rho, u + U);
  CHECK(sup_norm(VectorField(a1 - (a0 - ops.advect(U, u)))) < 1e-10);

  InertiaModel in;
  in.mu0 = 0.05;
  ScalarField sigma = inertia_sigma(ops, in, rho, u);
  VectorField K = inertia_K(ops, in, rho, u, sigma);
  CHECK(sup_norm(ScalarField(inertia_sigma(ops, in, rho, u + U) - sigma)) < 1e-12);
  VectorField k0 = inertia_momentum_K_rhs(ops, in, rho, u, K, sigma);
  VectorField k1 = inertia_momentum_K_rhs(ops, in, rho, u + U, K + U, sigma);
  CHECK(sup_norm(VectorField(k1 - (k0 - ops.advect(U, K)))) < 1e-10);
}

TEST_CASE("inertia pressure and energy at rest") {
  Ops ops(Grid::cube(3, 8));
  const Index N = ops.size();
  InertiaModel m;
  m.eos = {1.1, 1.6};
  m.mu0 = 0.4;
  const double rho0 = 1.3;
  ScalarField rho = ScalarField::Constant(N, rho0);
  VectorField zero = VectorField::Zero(N, 3);
  ScalarField s0 = ScalarField::Zero(N);
  const double P0 = m.eos.pressure(ScalarField::Constant(1, rho0))[0];
  CHECK(sup_norm(ScalarField(inertia_pressure(ops, m, rho, zero, s0, s0) - P0)) < 1e-12);
  CHECK(inertia_energy(ops, m, rho, zero, s0)[0] ==
        doctest::Approx(m.eos.volume_energy(ScalarField::Constant(1, rho0))[0]));
  CHECK(sup_norm(inertia_momentum_K_rhs(ops, m, rho, zero, zero, s0)) < 1e-13);

  // sigma = 0 gives the barotropic pressure for any density
  std::mt19937_64 rng(4);
  ScalarField wavy = positive_density(ops.grid(), rng);
  CHECK(sup_norm(ScalarField(inertia_pressure(ops, m, wavy, zero, s0, s0) - m.eos.pressure(wavy))) <
        1e-12);

  SGNModel sgn{1.0};
  CHECK(sup_norm(inertia_momentum_K_rhs(Ops(Grid::cube(2, 16)), sgn, ScalarField::Constant(256, 2.0),
                                        VectorField::Zero(256, 2), VectorField::Zero(256, 2),
                                        ScalarField::Zero(256))) < 1e-13);
}

TEST_CASE("model validation and potentials") {
  Grid g3 = Grid::cube(3, 8), g2 = Grid::cube(2, 8);
  CHECK_THROWS_AS(validate(Model(SGNModel{}), g3), ConfigError);
  CHECK_NOTHROW(validate(Model(SGNModel{}), g2));
  CHECK_THROWS_AS(validate(Model(SGNModel{-1}), g2), ConfigError);
  CHECK_THROWS_AS(validate(Model(CapillaryModel{{1, 2}, -0.1, {}}), g3), ConfigError);
  InertiaModel bad;
  bad.mu0 = -1;
  CHECK_THROWS_AS(validate(Model(bad), g3), ConfigError);
  CHECK(uses_K(Model(bad)));
  CHECK_FALSE(uses_K(Model(CapillaryModel{})));

  Potential zero;
  CHECK(zero.is_zero());
  CHECK(sup_norm(zero.value(1, 4)) == 0);
  Potential moving = Potential::time_dependent([](double t) {
    return ScalarField::Constant(3, std::sin(t));
  });
  CHECK(moving.depends_on_time());
  CHECK(moving.value(0.5, 3)[1] == doctest::Approx(std::sin(0.5)));
  CHECK(moving.rate(0.5, 3)[1] == doctest::Approx(std::cos(0.5)).epsilon(1e-8));
  CHECK(sup_norm(Potential::field(ScalarField::Ones(3)).rate(0, 3)) == 0);
}
