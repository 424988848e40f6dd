#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "prm/diagnostics.hpp"
#include "prm/errors.hpp"

using namespace prm;

TEST_CASE("Iwasawa first column is normalized") {
  for (const auto& g : {fixtures::mat2(2, 1, 1, 1), fixtures::mat2(0.3, -2, 5, 1), fixtures::mat2(1, 7, 0.2, 3)}) {
    Eigen::Matrix2d m = g;
    const Eigen::Vector2d c = iwasawa_first_column(m);
    CHECK(c(0) == doctest::Approx(1.0).epsilon(1e-14));
    const Eigen::Vector2d direct = m.transpose() * m.col(0) / m.col(0).squaredNorm();
    CHECK(c(1) == doctest::Approx(direct(1)).epsilon(1e-13));
  }
}

TEST_CASE("regularity profile is monotone with a positive exponent") {
  const MatrixModel m = fixtures::fib2();
  const SpectralData d = solve_spectral(m, 1.0, {256});
  std::vector<double> r_grid;
  for (int k = 1; k <= 8; ++k) r_grid.push_back(std::ldexp(1.0, -k));
  // y orthogonal to the attracting direction of A, so B(y, r) meets the support
  const Vec u = *dominant_direction(m.generator(0));
  const DualPoint y(Vec(Eigen::Vector2d(-u(1), u(0))));
  const DecayProfile p = regularity_profile(m, d, y, r_grid, {20000, 31, 0});
  for (std::size_t k = 1; k < p.probs.size(); ++k) CHECK(p.probs[k] <= p.probs[k - 1]);
  CHECK_FALSE(p.censored);
  CHECK(p.fitted_rate > 0.0);
  CHECK(p.ci_lo <= p.fitted_rate);
  CHECK(p.fitted_rate <= p.ci_hi);
}

TEST_CASE("regularity edge cases") {
  const MatrixModel m = fixtures::fib2();
  const SpectralData d = solve_spectral(m, 1.0, {256});
  const DecayProfile whole = regularity_profile(m, d, DualPoint::basis(2, 0), {1.0, 0.5}, {500, 32, 0});
  CHECK(whole.probs[0] == 1.0);
  const DecayProfile none =
      regularity_decay(m, d, ProjPoint::basis(2, 0), DualPoint::basis(2, 0), 50.0, 20, 5, {500, 33, 0});
  for (double p : none.probs) CHECK(p == 0.0);
  CHECK(none.censored);
  CHECK_THROWS_AS(regularity_profile(m, d, DualPoint::basis(2, 0), {0.5, 1.0}, {500, 32, 0}), DomainError);
}

TEST_CASE("determinant one gives opposite exponents") {
  const MatrixModel m = fixtures::fib2();
  const SpectralData d = solve_spectral(m, 0.0, {256});
  const LyapunovResult r = lyapunov_spectrum(m, d, 100, {2000, 34, 0});
  CHECK(std::abs(r.sum.value) <= 1e-12);
  CHECK(r.lambda2.value == doctest::Approx(-r.lambda1.value).epsilon(1e-10));
  CHECK(r.gap.value > 0.0);
}

TEST_CASE("rotations have no Cartan decay") {
  const MatrixModel m = fixtures::rotations();
  const SpectralData d = solve_spectral(m, 0.0, {256});
  const CartanTable t = cartan_convergence(m, d, ProjPoint::basis(2, 0), {5, 10, 20}, {500, 35, 0});
  for (const auto& row : t.rows) CHECK(std::abs(row.log_ratio.value) <= 1e-10);
  CHECK(std::abs(t.slope.value) <= 1e-10);
}

TEST_CASE("Cartan ratio decays on fib2") {
  const MatrixModel m = fixtures::fib2();
  const SpectralData d = solve_spectral(m, 1.0, {256});
  const CartanTable t = cartan_convergence(m, d, ProjPoint::basis(2, 0), {5, 10, 20}, {2000, 36, 0});
  CHECK(t.slope.value + 3 * t.slope.std_error < 0.0);
  CHECK(t.to_csv().find('\n') != std::string::npos);
}

TEST_CASE("Iwasawa increments respect the majorant") {
  const MatrixModel m = fixtures::fib2();
  const SpectralData d = solve_spectral(m, 1.0, {256});
  const IwasawaTable t = iwasawa_convergence(m, d, {2, 4, 6, 30}, 0.1, {1000, 37, 0}, ProjPoint::basis(2, 0), 10);
  CHECK(t.majorant_checks > 0);
  CHECK(t.majorant_violations == 0);
  CHECK(t.log_slope < 0.0);
}

TEST_CASE("CLT of the tilted walk") {
  const MatrixModel m = fixtures::fib2();
  const SpectralData d = solve_spectral(m, 1.0);
  const RateFunction rate = build_rate(m, 0.9, 1.1, 0.01);
  const CltResult c = clt_diagnostic(m, d, rate, fixtures::diagonal(), DualPoint(fixtures::diagonal().rep()), 100,
                                     {20000, 38, 0});
  CHECK(c.mean_err <= 4 * c.mean_err_se);
  CHECK(c.ks_distance <= 0.03);
  CHECK_THROWS_AS(clt_diagnostic(m, d, rate, fixtures::diagonal(), DualPoint::basis(2, 0), 10, {100, 1, 0}),
                  DomainError);
}
