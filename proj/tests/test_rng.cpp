#include <doctest.h>

#include <cmath>
#include <vector>

#include "prm/parallel.hpp"
#include "prm/rng.hpp"

using namespace prm;

TEST_CASE("Philox4x32-10 known answers") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("chains regenerate independently of order") {
  ChainRng a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
}

TEST_CASE("uniform and normal moments") {
  ChainRng rng(1, 0);
  std::vector<double> u(200000), z(200000);
  for (auto& v : u) {
    v = rng.uniform();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
  for (auto& v : z) v = rng.normal();
  const SampleStats su = summarize(u), sz = summarize(z);
  CHECK(std::abs(su.mean - 0.5) <= 4 * su.std_error);
  CHECK(su.variance == doctest::Approx(1.0 / 12).epsilon(0.01));
  CHECK(std::abs(sz.mean) <= 4 * sz.std_error);
  CHECK(sz.variance == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("derived seeds differ across streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("parallel_for and reductions do not depend on the worker count") {
  std::vector<double> a(10007), b(10007);
  parallel_for(a.size(), 1, [&](std::size_t i) { a[i] = ChainRng(9, i).uniform(); });
  parallel_for(b.size(), 4, [&](std::size_t i) { b[i] = ChainRng(9, i).uniform(); });
  CHECK(a == b);
  CHECK(pairwise_sum(a) == pairwise_sum(b));
  std::vector<double> ones(1000, 0.1);
  CHECK(pairwise_sum(ones) == doctest::Approx(100.0).epsilon(1e-15));
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8};
  CHECK(covariance(x, y) == doctest::Approx(2 * summarize(x).variance));
}
