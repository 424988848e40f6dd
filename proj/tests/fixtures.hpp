#pragma once

#include <cmath>
#include <numbers>

#include "prm/model.hpp"
#include "prm/rng.hpp"
#include "prm/spectral.hpp"

namespace fixtures {

inline prm::Mat mat2(double a, double b, double c, double d) {
  prm::Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

inline prm::MatrixModel fib2() { return prm::MatrixModel({mat2(2, 1, 1, 1), mat2(1, 1, 1, 2)}, {0.5, 0.5}); }

inline prm::Mat rotation(double th) { return mat2(std::cos(th), -std::sin(th), std::sin(th), std::cos(th)); }

/// lambda in {2, 1/2} w.p. 1/2 composed with rotations of incommensurate angles.
inline prm::MatrixModel similarity() {
  return prm::MatrixModel({2.0 * rotation(1.0), 0.5 * rotation(std::numbers::sqrt2)}, {0.5, 0.5});
}

inline prm::MatrixModel rotations() {
  return prm::MatrixModel({rotation(0.7), rotation(2.1)}, {0.5, 0.5});
}

inline prm::ProjPoint diagonal() { return prm::ProjPoint::from_angle(std::numbers::pi / 4); }

/// Node angle drawn from node masses, for starting chains in a stationary law.
inline double draw_node(const prm::SpectralData& d, const prm::GridFunction& masses, prm::ChainRng& rng) {
  double u = rng.uniform(), acc = 0.0;
  for (int i = 0; i < d.n; ++i) {
    acc += masses[i];
    if (u < acc) return d.grid().angle(i);
  }
  return d.grid().angle(d.n - 1);
}

}  // namespace fixtures
