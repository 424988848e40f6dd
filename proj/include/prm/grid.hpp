#pragma once

#include <span>
#include <vector>

#include "prm/geometry.hpp"

namespace prm {

using GridFunction = std::vector<double>;

/// Uniform grid theta_i = i pi / N on P^1 = [0, pi) with periodic linear
/// interpolation.
class ProjGrid {
 public:
  explicit ProjGrid(int n);

  int size() const { return n_; }
  double spacing() const { return h_; }
  double angle(int i) const { return h_ * i; }
  ProjPoint point(int i) const { return ProjPoint::from_angle(angle(i)); }

  struct Stencil {
    int lo = 0;
    int hi = 0;
    double w_lo = 1.0;
    double w_hi = 0.0;
  };

  /// Interpolation stencil for an angle in [0, pi).
  Stencil locate(double theta) const {
    const double t = theta / h_;
    int k = static_cast<int>(t);
    double fr = t - k;
    if (k >= n_) {
      k -= n_;
    }
    if (k < 0) {
      k = 0;
      fr = 0.0;
    }
    return {k, k + 1 == n_ ? 0 : k + 1, 1.0 - fr, fr};
  }

  double interpolate(std::span<const double> f, double theta) const {
    const Stencil st = locate(theta);
    return st.w_lo * f[st.lo] + st.w_hi * f[st.hi];
  }

  /// Values of fn at the grid nodes.
  template <class F>
  GridFunction sample(F&& fn) const {
    GridFunction out(n_);
    for (int i = 0; i < n_; ++i) out[i] = fn(angle(i));
    return out;
  }

 private:
  int n_;
  double h_;
};

/// Angle in [0, pi) of the line through a nonzero 2-vector.
inline double line_angle(double x, double y) {
  double a = std::atan2(y, x);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

}  // namespace prm
