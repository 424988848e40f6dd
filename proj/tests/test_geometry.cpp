#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "prm/geometry.hpp"

using namespace prm;
using fixtures::mat2;

TEST_CASE("directions are normalized with a sign convention") {
  Vec v(2);
  v << -3, -4;
  const ProjPoint p(v);
  CHECK(p.rep()(0) == doctest::Approx(0.6));
  CHECK(p.rep()(1) == doctest::Approx(0.8));
  CHECK(ProjPoint::from_angle(0.3 + std::numbers::pi).angle() == doctest::Approx(0.3));
  CHECK_THROWS_AS(ProjPoint(Vec::Zero(2)), DomainError);
}

TEST_CASE("action, cocycle and delta") {
  const Mat a = mat2(2, 1, 1, 1);
  const ProjPoint e1 = ProjPoint::basis(2, 0);
  CHECK(cocycle_sigma(a, e1) == doctest::Approx(std::log(std::sqrt(5.0))));
  CHECK(act(a, e1).angle() == doctest::Approx(std::atan2(1.0, 2.0)));
  CHECK(delta(DualPoint::basis(2, 1), e1) == doctest::Approx(0.0));
  CHECK(delta(DualPoint::from_angle(std::numbers::pi / 4), e1) == doctest::Approx(std::sqrt(0.5)));
  // cocycle: sigma(gh, x) = sigma(g, hx) + sigma(h, x)
  const Mat b = mat2(1, 1, 1, 2);
  const ProjPoint x = ProjPoint::from_angle(1.1);
  CHECK(cocycle_sigma(a * b, x) == doctest::Approx(cocycle_sigma(a, act(b, x)) + cocycle_sigma(b, x)).epsilon(1e-13));
  // the dual action preserves the pairing up to the cocycle
  const DualPoint y = DualPoint::from_angle(0.4);
  const double lhs = std::abs(y.rep().dot(a * x.rep()));
  const double rhs = std::abs((a.transpose() * y.rep()).dot(x.rep()));
  CHECK(lhs == doctest::Approx(rhs));
  CHECK(act_dual(a, y).rep().dot(a.transpose() * y.rep()) > 0.0);
}

TEST_CASE("angular distance uses the printed formula") {
  const ProjPoint a = ProjPoint::from_angle(0.0);
  const ProjPoint b = ProjPoint::from_angle(std::numbers::pi / 3);
  CHECK(angular_distance(a, b) == doctest::Approx(std::sqrt(0.5)));
  CHECK(angular_distance(a, a) == 0.0);
  CHECK(angular_distance(a, ProjPoint::from_angle(std::numbers::pi / 2)) == doctest::Approx(1.0));
}

TEST_CASE("Cartan and Iwasawa reconstruct their input") {
  for (const Mat& g : {mat2(2, 1, 1, 1), mat2(0.3, -1.7, 2.2, 0.4), mat2(-1, 5, 0.5, 3)}) {
    const CartanFrames c = cartan(g);
    CHECK((c.k * c.a * c.k_prime - g).norm() <= 1e-10 * g.norm());
    CHECK(c.a(0, 0) >= c.a(1, 1));
    CHECK(c.a(1, 1) > 0.0);
    CHECK(wedge2_norm(g) == doctest::Approx(std::abs(g.determinant())).epsilon(1e-12));

    const IwasawaFrames w = iwasawa(g);
    CHECK((w.L * w.A * w.K - g).norm() <= 1e-10 * g.norm());
    CHECK(w.L(0, 0) == doctest::Approx(1.0));
    CHECK(w.L(1, 1) == doctest::Approx(1.0));
    CHECK(w.L(0, 1) == 0.0);
    CHECK(w.A(0, 0) > 0.0);
    CHECK(w.A(1, 1) > 0.0);
    CHECK((w.K * w.K.transpose() - Mat::Identity(2, 2)).norm() <= 1e-12);
    // idempotence: decomposing L A K again returns the same frames
    const IwasawaFrames again = iwasawa(w.L * w.A * w.K);
    CHECK((again.L - w.L).norm() <= 1e-10);
    CHECK((again.A - w.A).norm() <= 1e-10 * w.A.norm());
    CHECK((again.K - w.K).norm() <= 1e-10);
  }
}

TEST_CASE("scaled product matches the direct product") {
  const Mat a = mat2(2, 1, 1, 1), b = mat2(1, 1, 1, 2);
  ScaledProduct p(2);
  Mat direct = Mat::Identity(2, 2);
  for (int k = 0; k < 12; ++k) {
    const Mat& g = (k % 3 == 0) ? a : b;
    p.left_multiply(g);
    direct = g * direct;
  }
  CHECK(p.log_norm() == doctest::Approx(std::log(direct.operatorNorm())).epsilon(1e-13));
  ScaledProduct long_run(2);
  for (int k = 0; k < 5000; ++k) long_run.left_multiply(a);
  // ||A^n|| = phi^{2n}
  CHECK(long_run.log_norm() == doctest::Approx(5000 * std::log((3 + std::sqrt(5.0)) / 2)).epsilon(1e-12));
}
