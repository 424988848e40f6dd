#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "prm/errors.hpp"
#include "prm/model.hpp"

using namespace prm;
using fixtures::mat2;

TEST_CASE("matrix functionals of simple matrices") {
  auto f = matrix_functionals(mat2(3, 0, 0, 1.0 / 3));
  CHECK(f.norm == doctest::Approx(3).epsilon(1e-14));
  CHECK(f.iota == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(f.n_g == doctest::Approx(3).epsilon(1e-14));

  f = matrix_functionals(Mat::Identity(2, 2));
  CHECK(f.norm == doctest::Approx(1));
  CHECK(f.iota == doctest::Approx(1));
  CHECK(f.n_g == doctest::Approx(1));

  f = matrix_functionals(mat2(2, 1, 1, 1));
  const double s5 = std::sqrt(5.0);
  CHECK(f.norm == doctest::Approx((3 + s5) / 2).epsilon(1e-14));
  CHECK(f.iota == doctest::Approx((3 - s5) / 2).epsilon(1e-14));
  CHECK(f.n_g == doctest::Approx((3 + s5) / 2).epsilon(1e-14));
  CHECK(f.iota * f.norm == doctest::Approx(1).epsilon(1e-14));

  CHECK_THROWS_AS(matrix_functionals(mat2(1, 2, 2, 4)), InvalidModel);
}

TEST_CASE("norm of g times norm of its inverse is at least one") {
  const Mat g = mat2(0.3, -1.7, 2.2, 0.4);
  const auto a = matrix_functionals(g);
  const auto b = matrix_functionals(g.inverse());
  CHECK(a.norm * b.norm >= 1.0);
  CHECK(a.iota == doctest::Approx(1.0 / b.norm).epsilon(1e-13));
}

TEST_CASE("model invariants") {
  CHECK_THROWS_AS(MatrixModel({Mat::Identity(2, 2)}, {1.0}), InvalidModel);
  CHECK_NOTHROW(MatrixModel({Mat::Identity(2, 2)}, {1.0}, ModelOptions{true}));
  CHECK_THROWS_AS(MatrixModel({mat2(2, 1, 1, 1), mat2(1, 1, 1, 2)}, {0.5, 0.6}), InvalidModel);
  CHECK_THROWS_AS(MatrixModel({mat2(2, 1, 1, 1), mat2(1, 1, 1, 2)}, {1.0, 0.0}), InvalidModel);
  CHECK_THROWS_AS(MatrixModel({mat2(2, 1, 1, 1), mat2(1, 2, 2, 4)}, {0.5, 0.5}), InvalidModel);
}

TEST_CASE("json round trip and strict keys") {
  const MatrixModel m = fixtures::fib2();
  const MatrixModel back = MatrixModel::from_json(m.to_json());
  CHECK(back.to_json() == m.to_json());
  auto doc = m.to_json();
  doc["gamma_exponent"] = 1;
  CHECK_THROWS_AS(MatrixModel::from_json(doc), ConfigError);
}

TEST_CASE("draw follows cumulative weights") {
  const MatrixModel m({mat2(2, 1, 1, 1), mat2(1, 1, 1, 2), mat2(1, 0, 1, 1)}, {0.2, 0.3, 0.5});
  CHECK(m.draw(0.0) == 0);
  CHECK(m.draw(0.19) == 0);
  CHECK(m.draw(0.21) == 1);
  CHECK(m.draw(0.49) == 1);
  CHECK(m.draw(0.51) == 2);
  CHECK(m.draw(0.999999) == 2);
}

TEST_CASE("validate finds the proximal witness A on fib2") {
  const ValidationReport rep = validate_model(fixtures::fib2(), 1.0, 0.5, 1.0, 1);
  REQUIRE(rep.proximal_witness.has_value());
  CHECK(*rep.proximal_witness == "A");
  // eigenvalues (3 +- sqrt 5)/2
  CHECK(rep.witness_gap == doctest::Approx(1.0 - (3 - std::sqrt(5.0)) / (3 + std::sqrt(5.0))).epsilon(1e-12));
  const ValidationReport deep = validate_model(fixtures::fib2(), 1.0, 0.5, 1.0, 4);
  CHECK(deep.irreducibility_pass);
  CHECK(deep.to_json() == validate_model(fixtures::fib2(), 1.0, 0.5, 1.0, 4).to_json());
}

TEST_CASE("rotations have no proximal witness") {
  const ValidationReport rep = validate_model(fixtures::rotations(), 1.0, 0.5, 1.0, 3);
  CHECK_FALSE(rep.proximal_witness.has_value());
  CHECK_FALSE(rep.irreducibility_pass);
}

TEST_CASE("moments are exact finite sums") {
  const MatrixModel m = fixtures::fib2();
  const double phi2 = (3 + std::sqrt(5.0)) / 2;
  for (double s : {-10.0, -1.0, 0.0, 2.0, 10.0}) {
    const double beta = 0.5;
    const double v = exponential_moment(m, s, beta);
    CHECK(std::isfinite(v));
    // both generators share the singular values phi^2 and phi^-2
    CHECK(v == doctest::Approx(std::pow(phi2, s + beta) * std::pow(1 / phi2, -beta)).epsilon(1e-12));
  }
  const ValidationReport rep = validate_model(m, 1.0, 0.5, 2.0, 1);
  CHECK(rep.n_g_moment == doctest::Approx(phi2 * phi2).epsilon(1e-12));
}
