#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "prm/errors.hpp"
#include "prm/sampler.hpp"

using namespace prm;

namespace {

const RateFunction& fib2_rate() {
  static const RateFunction r = build_rate(fixtures::fib2(), -0.3, 1.5, 0.01);
  return r;
}

}  // namespace

TEST_CASE("enumeration by hand at n = 1") {
  // word A gives <e1, A e1> = 2, word B gives 1
  const double p = enumerate_exact(fixtures::fib2(), ProjPoint::basis(2, 0), DualPoint::basis(2, 0), 1,
                                   std::log(2.0), Tail::upper);
  CHECK(p == doctest::Approx(0.5));
  const double q = enumerate_exact(fixtures::fib2(), ProjPoint::basis(2, 0), DualPoint::basis(2, 0), 1,
                                   std::log(2.0) - 1e-9, Tail::lower);
  CHECK(q == doctest::Approx(0.5));
  const double total = enumerate_expectation(fixtures::fib2(), ProjPoint::basis(2, 0), 8,
                                             [](const PathView&) { return 1.0; });
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(enumerate_expectation(fixtures::fib2(), ProjPoint::basis(2, 0), 40,
                                        [](const PathView&) { return 1.0; }),
                  BudgetError);
}

TEST_CASE("tilted enumeration sums to one") {
  const SpectralData d = solve_spectral(fixtures::fib2(), 1.0);
  const double total = enumerate_expectation(fixtures::fib2(), fixtures::diagonal(), 6,
                                             [](const PathView&) { return 1.0; }, &d);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("tabulated functions integrate exactly") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(TabulatedFunction::indicator(0.0, 1.0).laplace(1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(TabulatedFunction::indicator(0.0, inf).laplace(2.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(TabulatedFunction::indicator(-inf, 0.0).laplace(-0.5) == doctest::Approx(2.0).epsilon(1e-12));
  const TabulatedFunction ramp = TabulatedFunction::sample([](double u) { return u; }, 0.0, 1.0, 0.01);
  // int_0^1 u e^{-u} du = 1 - 2/e
  CHECK(ramp.laplace(1.0) == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-12));
  CHECK(ramp(0.5) == doctest::Approx(0.5));
  CHECK(ramp(2.0) == 0.0);
}

TEST_CASE("plain walks obey the law of large numbers") {
  // started from nu_0 the expected increment is exactly Lambda'(0)
  const MatrixModel m = fixtures::fib2();
  const SpectralData d0 = solve_spectral(m, 0.0);
  const int n = 200;
  std::vector<double> v(10000);
  for (std::size_t c = 0; c < v.size(); ++c) {
    ChainRng rng(77, c);
    const ProjPoint x = ProjPoint::from_angle(fixtures::draw_node(d0, d0.nu, rng));
    v[c] = walk(m, x, n, 5, c).log_norm / n;
  }
  const SampleStats st = summarize(v);
  CHECK(std::abs(st.mean - fib2_rate().lambda_prime(0.0)) <= 3 * st.std_error);
}

TEST_CASE("tilted walks obey the law of large numbers") {
  const MatrixModel m = fixtures::fib2();
  const SpectralData d = solve_spectral(m, 1.0);
  const int n = 100;
  std::vector<double> v(10000);
  for (std::size_t c = 0; c < v.size(); ++c) {
    ChainRng rng(78, c);
    const ProjPoint x = ProjPoint::from_angle(fixtures::draw_node(d, d.pi, rng));
    v[c] = tilted_walk(m, d, x, n, 6, c).log_norm / n;
  }
  const SampleStats st = summarize(v);
  CHECK(std::abs(st.mean - fib2_rate().lambda_prime(1.0)) <= 3 * st.std_error);
}

TEST_CASE("tilted walks carry an exact likelihood ratio") {
  const MatrixModel m = fixtures::fib2();
  const SpectralData d = solve_spectral(m, 1.0);
  const ProjPoint x = fixtures::diagonal();
  const int n = 10;
  std::vector<double> w(20000);
  for (std::size_t c = 0; c < w.size(); ++c) {
    const Trajectory t = tilted_walk(m, d, x, n, 8, c);
    w[c] = std::exp(n * d.log_kappa() - t.log_norm + std::log(d.r_at(x)) - std::log(d.r_at(t.x_path.back())) +
                    t.weight_log);
  }
  const SampleStats st = summarize(w);
  CHECK(std::abs(st.mean - 1.0) <= 4 * st.std_error);
}

TEST_CASE("walks are reproducible") {
  const Trajectory a = walk(fixtures::fib2(), fixtures::diagonal(), 30, 11, 4);
  const Trajectory b = walk(fixtures::fib2(), fixtures::diagonal(), 30, 11, 4);
  CHECK(a.word == b.word);
  CHECK(a.log_norm == b.log_norm);
  CHECK(a.x_path.size() == 31);
  const std::string csv = trajectories_csv(fixtures::fib2(), {a, b});
  CHECK(csv.rfind("word,log_norm,final_angle,weight_log\n", 0) == 0);
}

TEST_CASE("importance sampling matches enumeration at n = 6") {
  const MatrixModel m = fixtures::fib2();
  const SpectralData d = solve_spectral(m, 1.0);
  const ProjPoint x = fixtures::diagonal();
  const DualPoint f(x.rep());
  const double q = fib2_rate().lambda_prime(1.0);
  const double exact = enumerate_exact(m, x, f, 6, 6 * q, Tail::upper);
  const LDEstimate e = importance_estimator(m, d, fib2_rate(), x, f, 6, q, {20000, 21, 0}, Tail::upper);
  CHECK(std::abs(e.value - exact) <= 3 * e.std_error);
  const LDEstimate again = importance_estimator(m, d, fib2_rate(), x, f, 6, q, {20000, 21, 0}, Tail::upper);
  CHECK(again.value == e.value);
}

TEST_CASE("tail names") {
  CHECK(parse_tail("upper") == Tail::upper);
  CHECK(parse_tail("lower") == Tail::lower);
  CHECK(to_string(Tail::lower) == "lower");
  CHECK_THROWS(parse_tail("middle"));
}
