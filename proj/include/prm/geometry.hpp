#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "prm/errors.hpp"

namespace prm {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Line through the origin, stored as a unit vector whose first nonzero
/// coordinate is positive. The tag keeps P^{d-1} and its dual apart.
template <class Tag>
class Direction {
 public:
  explicit Direction(const Vec& v) : rep_(v) {
    const double n = rep_.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("direction needs a nonzero finite vector");
    rep_ /= n;
    for (Eigen::Index i = 0; i < rep_.size(); ++i) {
      if (rep_(i) != 0.0) {
        if (rep_(i) < 0.0) rep_ = -rep_;
        break;
      }
    }
  }

  /// Point of P^1 at angle theta (any real; reduced mod pi).
  static Direction from_angle(double theta) {
    Vec v(2);
    v << std::cos(theta), std::sin(theta);
    return Direction(v);
  }

  static Direction basis(int d, int i) { return Direction(Vec::Unit(d, i)); }

  const Vec& rep() const { return rep_; }
  int dim() const { return static_cast<int>(rep_.size()); }

  /// Angle in [0, pi); d = 2 only.
  double angle() const {
    if (dim() != 2) throw UnsupportedDimension(dim());
    double a = std::atan2(rep_(1), rep_(0));
    if (a < 0.0) a += std::numbers::pi;
    if (a >= std::numbers::pi) a -= std::numbers::pi;
    return a;
  }

  bool operator==(const Direction& o) const { return rep_ == o.rep_; }

 private:
  Vec rep_;
};

struct PrimalTag {};
struct DualTag {};
using ProjPoint = Direction<PrimalTag>;
using DualPoint = Direction<DualTag>;

/// g x = R g v
ProjPoint act(const Mat& g, const ProjPoint& x);
/// g^* y for the adjoint action on the dual projective space.
DualPoint act_dual(const Mat& g, const DualPoint& y);

/// sigma(g, x) = log |g v| / |v|
double cocycle_sigma(const Mat& g, const ProjPoint& x);

/// delta(y, x) = |<f, v>| / (|f| |v|), in [0, 1].
double delta(const DualPoint& y, const ProjPoint& x);

/// (1 - |<v, v'>| / (|v| |v'|))^{1/2}. This is the printed formula, not the
/// sine metric (1 - cos^2)^{1/2}; both are bi-Lipschitz equivalent.
template <class Tag>
double angular_distance(const Direction<Tag>& a, const Direction<Tag>& b) {
  const double c = std::min(1.0, std::abs(a.rep().dot(b.rep())));
  return std::sqrt(1.0 - c);
}

/// g = k a k' with a decreasing positive diagonal.
struct CartanFrames {
  Mat k;
  Mat a;
  Mat k_prime;

  Vec singular_values() const { return a.diagonal(); }
  /// k e_1 read as a dual direction (density point when g = G_n^*).
  DualPoint density_point() const { return DualPoint(Vec(k.col(0))); }
};

CartanFrames cartan(const Mat& g);

/// ||wedge^2 g|| = a_11 a_22.
double wedge2_norm(const Mat& g);

/// g = L A K with L lower unitriangular, A positive diagonal, K orthogonal.
struct IwasawaFrames {
  Mat L;
  Mat A;
  Mat K;
};

IwasawaFrames iwasawa(const Mat& g);

/// Matrix product kept as (M, log scale) with the entries of M of order one,
/// so long products do not overflow.
class ScaledProduct {
 public:
  explicit ScaledProduct(int d) : m_(Mat::Identity(d, d)), tmp_(d, d) {}

  /// this <- g * this
  void left_multiply(const Mat& g) {
    tmp_.noalias() = g * m_;
    m_.swap(tmp_);
    const double s = m_.cwiseAbs().maxCoeff();
    m_ /= s;
    log_scale_ += std::log(s);
  }

  const Mat& scaled() const { return m_; }
  double log_scale() const { return log_scale_; }
  double log_norm() const { return log_scale_ + std::log(m_.operatorNorm()); }

 private:
  Mat m_;
  Mat tmp_;
  double log_scale_ = 0.0;
};

}  // namespace prm
