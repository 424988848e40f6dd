#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "prm/model.hpp"

namespace prm {

/// Solver metadata for one node of the rate table.
struct RatePoint {
  double s = 0.0;
  bool ok = true;
  double residual = 0.0;  ///< max of the four eigen-residuals
  int iterations = 0;
  std::string message;    ///< failure reason when !ok
};

struct LegendreResult {
  double lambda_star = 0.0;
  double s_of_q = 0.0;
};

/// Tabulated Lambda = log kappa on a uniform s-grid with derivatives 1..5.
///
/// Between nodes Lambda is the quintic Hermite interpolant of
/// (Lambda, Lambda', Lambda''); Lambda' off the grid is its exact derivative,
/// so legendre() and cramer_h() are consistent to rounding.
class RateFunction {
 public:
  /// Derivatives from 7-point finite differences of `lambda`. Nodes with a
  /// NaN value are gaps.
  static RateFunction from_table(std::vector<double> s_grid, std::vector<double> lambda,
                                 std::vector<RatePoint> provenance = {}, int grid_n = 0);

  const std::vector<double>& s_grid() const { return s_; }
  const std::vector<double>& lambda_values() const { return lambda_; }
  /// Tabulated k-th derivative, k in 1..5.
  const std::vector<double>& derivative_values(int k) const;
  const std::vector<RatePoint>& provenance() const { return provenance_; }
  int grid_n() const { return grid_n_; }
  std::vector<double> gaps() const;

  double s_min() const { return s_.front(); }
  double s_max() const { return s_.back(); }

  /// Lambda^{(k)}(s) for k in 0..5. k <= 2 uses the Hermite interpolant,
  /// higher orders interpolate the table linearly.
  double derivative(int k, double s) const;
  double lambda(double s) const { return derivative(0, s); }
  double lambda_prime(double s) const { return derivative(1, s); }
  /// sigma_s = sqrt(Lambda''(s)).
  double sigma(double s) const;

  /// Span of nodes with finite Lambda and Lambda'' (gaps at the ends trimmed).
  std::array<double, 2> s_range() const;
  /// Achievable q-interval [Lambda'(s_min), Lambda'(s_max)].
  std::array<double, 2> q_range() const;

  nlohmann::json to_json() const;
  std::string to_csv() const;

 private:
  std::size_t locate(double s) const;
  std::array<std::size_t, 2> usable() const;
  void check_span(std::size_t lo, std::size_t hi, double s) const;

  std::vector<double> s_;
  std::vector<double> lambda_;
  std::array<std::vector<double>, 5> deriv_;
  std::vector<RatePoint> provenance_;
  int grid_n_ = 0;
  double step_ = 0.0;
};

/// Solves P_s on every node s = k * step in [s_lo, s_hi].
RateFunction build_rate(const MatrixModel& model, double s_lo, double s_hi, double step,
                        int grid_n = 1024, double tol = 1e-12, unsigned workers = 0);

/// Lambda*(q) and the tilt s with Lambda'(s) = q (bisection to 1e-12).
LegendreResult legendre(const RateFunction& rate, double q);

/// h_s(l) = Lambda*(q + l) - Lambda*(q) - s l with q = Lambda'(s).
double cramer_h(const RateFunction& rate, double s, double l);

/// Truncated Cramer series zeta_s(t); order 0, 1 or 2 keeps that many powers of t.
double cramer_series(const RateFunction& rate, double s, double t, int order = 2);

/// Finite-difference weights (Fornberg) for derivatives 0..max_order at x0
/// from the nodes xs.
std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& xs, int max_order);

}  // namespace prm
