#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "prm/errors.hpp"
#include "prm/spectral.hpp"

using namespace prm;

TEST_CASE("transfer operator on a constant function") {
  const ProjGrid grid(512);
  const GridFunction ones(512, 1.0);
  const GridFunction out = apply_transfer(fixtures::fib2(), 1.0, grid, ones, false);
  // 1/2 |A e1| + 1/2 |B e1| = (sqrt 5 + sqrt 2) / 2
  CHECK(out[0] == doctest::Approx((std::sqrt(5.0) + std::sqrt(2.0)) / 2).epsilon(1e-14));
  const GridFunction sim = apply_transfer(fixtures::similarity(), 0.7, grid, ones, false);
  for (double v : sim) CHECK(v == doctest::Approx(0.5 * (std::pow(2.0, 0.7) + std::pow(0.5, 0.7))).epsilon(1e-13));
}

TEST_CASE("s = 0 gives kappa 1 and constant r") {
  const SpectralData d = solve_spectral(fixtures::fib2(), 0.0);
  CHECK(std::abs(d.kappa - 1.0) <= 1e-10);
  for (double v : d.r) CHECK(std::abs(v - 1.0) <= 1e-10);
  double total = 0.0;
  for (double v : d.nu) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("similarity closed forms") {
  for (double s : {-0.3, 0.5, 1.0, 1.5}) {
    const SpectralData d = solve_spectral(fixtures::similarity(), s);
    CHECK(std::abs(d.kappa - 0.5 * (std::pow(2.0, s) + std::pow(2.0, -s))) <= 1e-8);
    for (double v : d.r) CHECK(std::abs(v - 1.0) <= 1e-8);
  }
}

TEST_CASE("kappa(1) on fib2 is stable under grid refinement") {
  SolverSettings fine;
  fine.grid_n = 2048;
  const double k1 = solve_spectral(fixtures::fib2(), 1.0).kappa;
  const double k2 = solve_spectral(fixtures::fib2(), 1.0, fine).kappa;
  CHECK(std::abs(k1 - k2) / k2 <= 1e-6);
  CHECK(k1 == doctest::Approx(2.5).epsilon(1e-5));
}

TEST_CASE("tilts below the solver range are rejected") {
  CHECK_THROWS_AS(solve_spectral(fixtures::fib2(), kMinTilt - 0.1), DomainError);
}

// Reference values from tools/oracles/delta_cell.py (mpmath, 40 digits).
TEST_CASE("cell kernel against the quadrature oracle") {
  const double h = 0.01;
  CHECK(delta_power_cell(0.3, -0.5, h) == doctest::Approx(1.0231136675240945969).epsilon(1e-13));
  CHECK(delta_power_cell(1.57, -0.5, h) == doctest::Approx(26.130878252997362883).epsilon(1e-13));
  CHECK(delta_power_cell(1.57, -0.2, h) == doctest::Approx(3.4679664775471756702).epsilon(1e-13));
  CHECK(delta_power_cell(1.57, 2.5, h) == doctest::Approx(1.3333401810435978041e-6).epsilon(1e-12));
  CHECK(delta_power_cell(2, 1, h) == doctest::Approx(0.41614336866839744118).epsilon(1e-13));
  CHECK(delta_power_cell(1.5708, 0.5, h) == doctest::Approx(0.05333324086767456566).epsilon(1e-13));
  CHECK(delta_power_cell(0.8, 0.0, h) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("duality residual at s = 1 is small and shrinks with N") {
  SolverSettings coarse;
  coarse.grid_n = 512;
  const double r512 = duality_residual(solve_spectral(fixtures::fib2(), 1.0, coarse));
  const double r1024 = duality_residual(solve_spectral(fixtures::fib2(), 1.0));
  CHECK(r1024 <= 1e-3);
  CHECK(r1024 < r512);
  CHECK(conjugation_defect(solve_spectral(fixtures::fib2(), 1.0)) <= 1e-10);
}

TEST_CASE("tilt kernel weights") {
  const MatrixModel m = fixtures::fib2();
  const SpectralData d = solve_spectral(m, 1.0);
  const ProjPoint e1 = ProjPoint::basis(2, 0);
  const TiltWeights w = tilt_kernel(m, d, e1);
  const double a = std::sqrt(5.0) * d.r_at(act(m.generator(0), e1));
  const double b = std::sqrt(2.0) * d.r_at(act(m.generator(1), e1));
  CHECK(w.weights[0] == doctest::Approx(a / (a + b)).epsilon(1e-13));
  CHECK(w.weights[0] + w.weights[1] == doctest::Approx(1.0));
  // r is an eigenfunction, so the raw normalizer is close to one
  CHECK(w.raw_sum == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("perturbed operator") {
  const MatrixModel m = fixtures::fib2();
  const SpectralData d = solve_spectral(m, 1.0);
  CHECK(std::abs(perturbed_gap(m, d, 0.0, 128) - 1.0) <= 1e-10);
  const double g = perturbed_gap(m, d, 1.0, 128);
  CHECK(g < 1.0 - 1e-4);
  CHECK(g > 0.0);
}

TEST_CASE("spectral data json round trip") {
  SolverSettings st;
  st.grid_n = 64;
  const SpectralData d = solve_spectral(fixtures::fib2(), 0.5, st);
  const SpectralData back = SpectralData::from_json(d.to_json());
  CHECK(back.kappa == d.kappa);
  CHECK(back.r == d.r);
  CHECK(back.nu == d.nu);
  CHECK(back.to_json() == d.to_json());
}

TEST_CASE("empirical kappa") {
  // similarity model: ||G_n||^s is a product, so the ratio estimator is unbiased
  const KappaEstimate e = empirical_kappa(fixtures::similarity(), 1.0, 10, {20000, 3, 0});
  CHECK(std::abs(e.estimate - 1.25) <= 4 * e.std_error);
  const KappaEstimate f = empirical_kappa(fixtures::fib2(), 1.0, 20, {50000, 4, 0});
  CHECK(std::abs(f.estimate - solve_spectral(fixtures::fib2(), 1.0).kappa) <= 4 * f.std_error);
}
