#include <cmath>
#include <random>

#include "doctest.h"
#include "nozzleflow/gas.hpp"
#include "oracles.hpp"

using namespace nozzleflow;

namespace {
const GasModel<> kAir(1.4, 0.05);
const DensityRelation<>& kRho = kAir.relation();
}  // namespace

TEST_CASE("gas law is convex and increasing") {
  GasLaw<> law(1.4);
  for (double rho : {0.01, 0.3, 1.0, 2.5, 10.0}) {
    CHECK(law.pressure_derivative(rho) > 0);
    CHECK(law.pressure_second_derivative(rho) > 0);
  }
  CHECK_THROWS_AS(GasLaw<>(1.0), DomainError);
}

TEST_CASE("density from Bernoulli") {
  CHECK(kRho.density(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kRho.density(0.0) == doctest::Approx(std::pow(1.2, 2.5)).epsilon(1e-14));
  CHECK(kRho.density(0.0) == doctest::Approx(1.5774).epsilon(1e-4));
  CHECK(kRho.density(0.25) == doctest::Approx(std::pow(1.15, 2.5)).epsilon(1e-14));

  // Stagnation density from q^2/2 + h(rho) = 1/2 with h by quadrature of p'(s)/s.
  GasLaw<> law(1.4);
  auto h_quad = [&](double rho) {
    return oracle::adaptive_simpson([&](double s) { return law.pressure_derivative(s) / s; }, 1.0, rho);
  };
  const double stagnation = oracle::bisect_increasing([&](double rho) { return h_quad(rho) - 0.5; }, 1.0, 3.0);
  CHECK(kRho.density(0.0) == doctest::Approx(stagnation).epsilon(1e-10));

  CHECK_THROWS_AS(kRho.density(-0.1), DomainError);
  CHECK_THROWS_AS(kRho.density(kRho.vacuum_bound()), DomainError);
  CHECK_THROWS_AS(kRho.density(7.0), DomainError);
}

TEST_CASE("enthalpy") {
  GasLaw<> law(1.4);
  CHECK(law.enthalpy(1.0) == 0.0);
  const double quad = oracle::adaptive_simpson([&](double s) { return law.pressure_derivative(s) / s; }, 1.0, 2.0);
  CHECK(law.enthalpy(2.0) == doctest::Approx(quad).epsilon(1e-10));
  CHECK(law.enthalpy(2.0) == doctest::Approx((std::pow(2.0, 0.4) - 1) / 0.4).epsilon(1e-14));
  CHECK(law.enthalpy(0.5) < 0);
  CHECK_THROWS_AS(law.enthalpy(0.0), DomainError);
  CHECK_THROWS_AS(law.enthalpy(-1.0), DomainError);
}

TEST_CASE("momentum bound and subsonic equivalence") {
  for (int i = 0; i <= 1000; ++i) {
    const double q = i / 1000.0;
    const double j = kRho.momentum(q);
    CHECK(j <= 1 + 1e-12);
    if (q < 0.999) CHECK(j < 1 - 1e-12);
    const bool subsonic = kRho.mach(q) < 1;
    CHECK(subsonic == (q < 1));
    if (q < 1) CHECK(kRho.density(q * q) > 1);
  }
  CHECK(kRho.momentum(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 1; i <= 1000; ++i) CHECK(kRho.density((i / 1000.0) * (i / 1000.0)) < kRho.density(((i - 1) / 1000.0) * ((i - 1) / 1000.0)));
}

TEST_CASE("theta agrees with rho below the band and is constant above") {
  const auto& th = kAir.truncation();
  CHECK(th.theta(0.5) == kRho.density(0.5));
  CHECK(th.theta(2.0) == kRho.density(0.95));
  for (int i = 0; i <= 900; ++i) {
    const double s2 = 0.9 * i / 900.0 * (1 - 1e-15);
    CHECK(th.theta(s2) == kRho.density(s2));
  }
  for (double s2 : {0.95, 0.96, 1.0, 3.0, 100.0}) {
    CHECK(th.theta(s2) == kRho.density(0.95));
    CHECK(th.theta_prime(s2) == 0.0);
  }
  const double mid = th.theta(0.925);
  CHECK(mid < kRho.density(0.90));
  CHECK(mid > kRho.density(0.95));
  CHECK(th.theta_prime(0.925) <= 0);
  // Continuity at both band ends.
  CHECK(th.theta(0.95 - 1e-13) == doctest::Approx(kRho.density(0.95)).epsilon(1e-11));
  CHECK(th.theta(0.9 + 1e-13) == doctest::Approx(kRho.density(0.9)).epsilon(1e-11));
  CHECK(th.theta_prime(0.9 + 1e-13) == doctest::Approx(kRho.density_derivative(0.9)).epsilon(1e-9));
  CHECK(std::abs(th.theta_prime(0.95 - 1e-13)) < 1e-9);
}

TEST_CASE("theta is monotone and C1 across schedules") {
  for (double delta : {0.2, 0.1, 0.05, 0.025, 0.01}) {
    CAPTURE(delta);
    TruncatedDensity<> th(kRho, delta);
    double prev = th.theta(0);
    const int n = 200000;
    for (int i = 1; i <= n; ++i) {
      const double s2 = 2.0 * i / n;
      const double v = th.theta(s2);
      REQUIRE(v <= prev + 1e-15);
      prev = v;
    }
    // theta_prime against central differences, including the bridge interior.
    const auto br = th.bridge_breakpoints();
    for (int i = 1; i < 400; ++i) {
      const double s2 = br[0] + (br[3] - br[0]) * i / 400.0;
      const double h = 1e-7;
      const double fd = (th.theta(s2 + h) - th.theta(s2 - h)) / (2 * h);
      CHECK(th.theta_prime(s2) == doctest::Approx(fd).epsilon(1e-5).scale(1e-6));
    }
  }
}

TEST_CASE("energy density F") {
  const auto& F = kAir.energy();
  CHECK(F(0.0) == 0.0);
  const double quad = oracle::adaptive_simpson([](double s) { return kRho.density(s); }, 0.0, 0.25) / 2;
  CHECK(F(0.25) == doctest::Approx(quad).epsilon(1e-12));

  const auto& th = kAir.truncation();
  auto theta = [&](double s) { return th.theta(s); };
  const auto br = th.bridge_breakpoints();
  double total = 0;
  for (int i = 0; i < 3; ++i) total += oracle::adaptive_simpson(theta, br[i], br[i + 1]);
  total += oracle::adaptive_simpson(theta, 0.0, 0.9);
  total += kRho.density(0.95) * (3.0 - 0.95);
  CHECK(F(3.0) == doctest::Approx(total / 2).epsilon(1e-12));

  for (double q2 : {0.0, 0.1, 0.5, 0.89, 0.9, 0.91, 0.925, 0.94, 0.949, 0.95, 1.2, 3.0}) {
    const double inner = oracle::adaptive_simpson(theta, 0.0, std::min(q2, 0.9)) +
                         (q2 > 0.9 ? oracle::adaptive_simpson(theta, 0.9, q2) : 0.0);
    CHECK(F(q2) == doctest::Approx(inner / 2).epsilon(1e-10).scale(1e-14));
  }

  for (int i = 1; i < 300; ++i) {
    const double q2 = 2.0 * i / 300.0;
    const double h = 1e-6;
    const double fd = (F(q2 + h) - F(q2 - h)) / (2 * h);
    CHECK(fd == doctest::Approx(F.derivative(q2)).epsilon(1e-6));
  }
  // F(q^2) ~ q^2.
  double lo = 1e9, hi = 0;
  for (int i = 1; i <= 2000; ++i) {
    const double q = 2.0 * i / 2000.0;
    lo = std::min(lo, F(q * q) / (q * q));
    hi = std::max(hi, F(q * q) / (q * q));
  }
  CHECK(lo > 0.4);
  CHECK(hi < 0.8);
}

TEST_CASE("solve_q_from_flux") {
  CHECK(solve_q_from_flux(kRho, 0.0) == 0.0);
  CHECK(solve_q_from_flux(kRho, kRho.momentum(0.5)) == doctest::Approx(0.5).epsilon(1e-14));
  double prev = 0;
  for (double j : {0.9, 0.99, 0.9999, 0.999999}) {
    const double q = solve_q_from_flux(kRho, j);
    CHECK(q < 1);
    CHECK(q > prev);
    CHECK(std::abs(kRho.momentum(q) - j) < 1e-12);
    prev = q;
  }
  CHECK(prev > 0.99);
  CHECK_THROWS_AS(solve_q_from_flux(kRho, 1.0), InfeasibleFluxError);
  CHECK_THROWS_AS(solve_q_from_flux(kRho, 1.3), InfeasibleFluxError);
  CHECK_THROWS_AS(solve_q_from_flux(kRho, -0.1), DomainError);
}

TEST_CASE("ellipticity bounds") {
  const auto& th = kAir.truncation();
  const auto b = ellipticity_bounds(th);
  CHECK(b.lambda > 0);
  CHECK(b.lambda < b.Lambda);
  CHECK(b.Lambda >= th.theta(0));

  // Dense-sampling oracle with finite-difference slopes.
  double lo = 1e9, hi = 0;
  for (int i = 0; i <= 100000; ++i) {
    const double s2 = 4.0 * i / 100000.0;
    const double h = 1e-8;
    const double d = s2 > h ? (th.theta(s2 + h) - th.theta(s2 - h)) / (2 * h) : th.theta_prime(s2);
    lo = std::min({lo, th.theta(s2), th.theta(s2) + 2 * d * s2});
    hi = std::max({hi, th.theta(s2), th.theta(s2) + 2 * d * s2});
  }
  CHECK(b.lambda == doctest::Approx(lo).epsilon(1e-5));
  CHECK(b.Lambda == doctest::Approx(hi).epsilon(1e-12));
  CHECK(b.Lambda == doctest::Approx(std::pow(1.2, 2.5)).epsilon(1e-14));
  // Frozen from an independent trapezoid integration of the bridge slope.
  CHECK(b.lambda == doctest::Approx(0.0456126).epsilon(1e-4));

  for (double delta : {0.2, 0.1, 0.025, 0.01}) CHECK(ellipticity_bounds(TruncatedDensity<>(kRho, delta)).lambda > 0);
  CHECK_THROWS_AS(TruncatedDensity<>(kRho, 0.0), DomainError);
  CHECK_THROWS_AS(TruncatedDensity<>(kRho, 0.25), DomainError);
}

TEST_CASE("a_ij is uniformly elliptic for random states") {
  const auto& th = kAir.truncation();
  const auto b = ellipticity_bounds(th);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 10000; ++k) {
    const double w0 = u(rng), w1 = u(rng), x0 = u(rng), x1 = u(rng);
    const double s2 = w0 * w0 + w1 * w1;
    const double t = th.theta(s2), tp = th.theta_prime(s2);
    const double wx = w0 * x0 + w1 * x1;
    const double form = t * (x0 * x0 + x1 * x1) + 2 * tp * wx * wx;
    const double xi2 = x0 * x0 + x1 * x1;
    CHECK(form >= b.lambda * xi2 * (1 - 1e-9));
    CHECK(form <= b.Lambda * xi2 * (1 + 1e-12));
  }
}
