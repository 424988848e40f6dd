#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>

#include "fixtures.hpp"
#include "prm/errors.hpp"
#include "prm/ldp.hpp"

using namespace prm;

namespace {

const RateFunction& fib2_rate() {
  static const RateFunction r = build_rate(fixtures::fib2(), -0.3, 1.5, 0.01);
  return r;
}

const SpectralData& data_at(double s) {
  static std::map<double, SpectralData> cache;
  auto it = cache.find(s);
  if (it == cache.end()) it = cache.emplace(s, solve_spectral(fixtures::fib2(), s)).first;
  return it->second;
}

TheoremInput input(double s, int n = 80) {
  TheoremInput in;
  in.x = fixtures::diagonal();
  in.y = DualPoint(fixtures::diagonal().rep());
  in.n = n;
  in.s = s;
  return in;
}

}  // namespace

TEST_CASE("the LLN point has no tail expansion") {
  try {
    bahadur_rao_upper(data_at(0.0), fib2_rate(), input(0.0));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()) == "q equals the LLN point; rate is zero");
  }
}

TEST_CASE("input checks") {
  TheoremInput both = input(1.0);
  both.q = 0.917;
  CHECK_THROWS_AS(bahadur_rao_upper(data_at(1.0), fib2_rate(), both), DomainError);
  TheoremInput none = input(1.0);
  none.s.reset();
  CHECK_THROWS_AS(bahadur_rao_upper(data_at(1.0), fib2_rate(), none), DomainError);
  // spectral data solved at a different tilt
  CHECK_THROWS_AS(bahadur_rao_upper(data_at(0.5), fib2_rate(), input(1.0)), DomainError);
  CHECK_THROWS_AS(bahadur_rao_upper(data_at(-0.2), fib2_rate(), input(-0.2)), DomainError);
}

TEST_CASE("q input resolves to the same tilt") {
  TheoremInput by_q = input(1.0);
  by_q.s.reset();
  by_q.q = fib2_rate().lambda_prime(1.0);
  const TheoryValue a = bahadur_rao_upper(data_at(1.0), fib2_rate(), input(1.0));
  const TheoryValue b = bahadur_rao_upper(data_at(1.0), fib2_rate(), by_q);
  CHECK(b.value == doctest::Approx(a.value).epsilon(1e-8));
  CHECK(a.exponent == doctest::Approx(legendre(fib2_rate(), a.q).lambda_star).epsilon(1e-9));
}

TEST_CASE("lower tail") {
  const TheoryValue v = bahadur_rao_lower(data_at(-0.2), fib2_rate(), input(-0.2));
  CHECK(v.value > 0.0);
  CHECK(v.exponent > 0.0);
  CHECK(v.q < fib2_rate().lambda_prime(0.0));
  CHECK(v.log_value == doctest::Approx(std::log(v.value)));
}

TEST_CASE("local limit expansion is additive in the interval") {
  const double inf = std::numeric_limits<double>::infinity();
  auto llt = [&](double a1, double a2) {
    TheoremInput in = input(1.0);
    in.a1 = a1;
    in.a2 = a2;
    return llt_theory(data_at(1.0), fib2_rate(), in).value;
  };
  CHECK(llt(0.0, 1.0) == doctest::Approx(llt(0.0, 0.5) + llt(0.5, 1.0)).epsilon(1e-12));
  // the half line [0, inf) recovers the tail expansion
  CHECK(llt(0.0, inf) == doctest::Approx(bahadur_rao_upper(data_at(1.0), fib2_rate(), input(1.0)).value)
                             .epsilon(1e-12));
  CHECK_THROWS_AS(llt(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(llt(-inf, 0.0), DomainError);
}

TEST_CASE("target expansion with an indicator matches the tail expansion") {
  TheoremInput in = input(1.0);
  in.psi = TabulatedFunction::indicator(0.0, std::numeric_limits<double>::infinity());
  const double target = target_theory(data_at(1.0), fib2_rate(), in).value;
  const double tail = bahadur_rao_upper(data_at(1.0), fib2_rate(), input(1.0)).value;
  CHECK(target == doctest::Approx(tail).epsilon(1e-10));
}

TEST_CASE("shifted threshold carries the Cramer correction") {
  const RateFunction& rate = fib2_rate();
  TheoremInput in = input(1.0);
  in.psi = TabulatedFunction::indicator(0.0, std::numeric_limits<double>::infinity());
  const double base = target_theory(data_at(1.0), rate, in).value;
  for (double l : {2e-4, -2e-4}) {
    in.l = l;
    const double shifted = target_theory(data_at(1.0), rate, in).value;
    const double expected = std::exp(-in.n * (l + cramer_h(rate, 1.0, l)));
    CHECK(std::abs(shifted / base - expected) <= 1e-10);
  }
}

TEST_CASE("changed measure from s = 0 is the tail expansion") {
  const TheoryValue changed = changed_measure_theory(data_at(0.0), data_at(1.0), fib2_rate(), input(1.0));
  const TheoryValue tail = bahadur_rao_upper(data_at(1.0), fib2_rate(), input(1.0));
  CHECK(changed.value == doctest::Approx(tail.value).epsilon(1e-8));
  CHECK_THROWS_AS(changed_measure_theory(data_at(1.0), data_at(1.0), fib2_rate(), input(1.0)), DomainError);
}

TEST_CASE("expansion decays at the Legendre rate") {
  const double v1 = bahadur_rao_upper(data_at(1.0), fib2_rate(), input(1.0, 100)).log_value;
  const double v2 = bahadur_rao_upper(data_at(1.0), fib2_rate(), input(1.0, 400)).log_value;
  const double star = legendre(fib2_rate(), fib2_rate().lambda_prime(1.0)).lambda_star;
  // log value = c - n star - log(n) / 2
  CHECK((v1 - v2) == doctest::Approx(300 * star + 0.5 * std::log(4.0)).epsilon(1e-10));
}
