#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "prm/errors.hpp"
#include "prm/rate.hpp"

using namespace prm;

namespace {

const RateFunction& fib2_rate() {
  static const RateFunction r = build_rate(fixtures::fib2(), -0.3, 1.5, 0.01);
  return r;
}

}  // namespace

TEST_CASE("finite-difference weights are exact on polynomials") {
  const std::vector<double> xs{-3, -2, -1, 0, 1, 2, 3};
  const auto w = fd_weights(0.0, xs, 5);
  for (int deg = 0; deg <= 6; ++deg) {
    for (int k = 0; k <= 5; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) sum += w[k][i] * std::pow(xs[i], deg);
      double exact = 0.0;
      if (k == deg) exact = std::tgamma(deg + 1.0);
      CHECK(sum == doctest::Approx(exact).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("similarity closed form for Lambda") {
  const RateFunction r = build_rate(fixtures::similarity(), -0.3, 1.5, 0.01, 256);
  const double l2 = std::log(2.0);
  CHECK(std::abs(r.lambda(0.0)) <= 1e-10);
  CHECK(std::abs(r.lambda_prime(0.0)) <= 1e-8);
  CHECK(r.derivative(2, 0.0) == doctest::Approx(l2 * l2).epsilon(1e-6));
  CHECK(r.lambda(0.73) == doctest::Approx(std::log(std::cosh(0.73 * l2))).epsilon(1e-10));
  CHECK(r.lambda_prime(0.73) == doctest::Approx(l2 * std::tanh(0.73 * l2)).epsilon(1e-8));
}

TEST_CASE("Legendre transform self-consistency on fib2") {
  const RateFunction& r = fib2_rate();
  const double q = r.lambda_prime(1.0);
  const LegendreResult lr = legendre(r, q);
  CHECK(lr.lambda_star == doctest::Approx(q - r.lambda(1.0)).epsilon(1e-8));
  CHECK(lr.s_of_q == doctest::Approx(1.0).epsilon(1e-9));
  const auto range = r.q_range();
  CHECK_THROWS_AS(legendre(r, range[1] + 1e-3), DomainError);
  CHECK(r.sigma(1.0) == doctest::Approx(std::sqrt(r.derivative(2, 1.0))));
}

TEST_CASE("Lambda is convex and increasing in the tilt") {
  const RateFunction& r = fib2_rate();
  double prev = r.lambda_prime(-0.3);
  for (double s = -0.25; s <= 1.5; s += 0.05) {
    CHECK(r.derivative(2, s) > 0.0);
    CHECK(r.lambda_prime(s) > prev);
    prev = r.lambda_prime(s);
  }
}

TEST_CASE("rate table is stable when the step is halved") {
  const RateFunction half = build_rate(fixtures::fib2(), 0.3, 0.7, 0.005);
  CHECK(std::abs(half.lambda_prime(0.5) - fib2_rate().lambda_prime(0.5)) <= 1e-9);
}

TEST_CASE("interpolant is continuous across nodes") {
  const RateFunction& r = fib2_rate();
  for (double s : {0.5, 1.0}) {
    for (int k = 0; k <= 2; ++k) {
      const double left = r.derivative(k, s - 1e-13), right = r.derivative(k, s + 1e-13);
      CHECK(std::abs(left - right) <= 1e-9 * std::abs(r.derivative(k, s)));
    }
  }
}

TEST_CASE("Cramer function against its series") {
  const RateFunction& r = fib2_rate();
  const double sigma = r.sigma(1.0);
  CHECK(cramer_h(r, 1.0, 0.0) == 0.0);
  for (double l : {5e-4, 2e-4, -3e-4}) {
    const double t = l / sigma;
    const double series = t * t / 2 - t * t * t * cramer_series(r, 1.0, t, 2);
    CHECK(std::abs(cramer_h(r, 1.0, l) - series) <= 10 * std::pow(std::abs(t), 5));
  }
  CHECK_THROWS_AS(cramer_h(r, 1.0, 0.05), DomainError);
}

TEST_CASE("csv and json exports") {
  const RateFunction& r = fib2_rate();
  const std::string csv = r.to_csv();
  CHECK(csv.rfind("s,lambda,d1,d2,d3,d4,d5,solver_residual\n", 0) == 0);
  const auto doc = r.to_json();
  CHECK(doc.contains("grid_n"));
}
