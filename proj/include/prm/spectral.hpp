#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "prm/grid.hpp"
#include "prm/model.hpp"
#include "prm/parallel.hpp"

namespace prm {

struct SolverSettings {
  int grid_n = 1024;
  double tol = 1e-12;
  int max_iter = 100000;
};

/// Lowest tilt accepted by the grid solver.
inline constexpr double kMinTilt = -0.5;

/// Collocation matrix of the transfer operator P_s (or its conjugate P_s^*,
/// built from transposed generators) on a ProjGrid. Each row holds 2m
/// nonzeros: the linear-interpolation weights at g_j x_i scaled by
/// p_j e^{s sigma(g_j, x_i)}.
class TransferOperator {
 public:
  TransferOperator(const MatrixModel& model, double s, const ProjGrid& grid, bool conjugate);

  int size() const { return n_; }
  void apply(std::span<const double> in, std::span<double> out) const;
  void apply_transpose(std::span<const double> in, std::span<double> out) const;
  /// Dense copy for tests and small N.
  Mat dense() const;

 private:
  int n_;
  int per_row_;
  std::vector<int> cols_;
  std::vector<double> vals_;
};

/// (P_s phi)(theta_i) on the grid; `conjugate` selects P_s^*.
GridFunction apply_transfer(const MatrixModel& model, double s, const ProjGrid& grid,
                            std::span<const double> fn, bool conjugate);

/// Dominant spectral data of P_s and P_s^* on a grid of N nodes.
///
/// Normalization: max r_s = max r_s^* = 1; nu_s, nu_s^* and pi_s are
/// probability vectors. nu_s[i] is the mass the discrete eigenmeasure puts at
/// node i.
struct SpectralData {
  double s = 0.0;
  int n = 0;
  double kappa = 0.0;
  double kappa_star = 0.0;  ///< Perron root of the discretized conjugate operator
  GridFunction r;
  GridFunction nu;
  GridFunction r_star;
  GridFunction nu_star;
  double rho = 0.0;  ///< nu_s(r_s) in the max r_s = 1 normalization
  GridFunction pi;
  double residual_r = 0.0;
  double residual_nu = 0.0;
  double residual_r_star = 0.0;
  double residual_nu_star = 0.0;
  int iterations = 0;

  ProjGrid grid() const { return ProjGrid(n); }
  double log_kappa() const { return std::log(kappa); }
  /// r_s at an arbitrary point, by periodic linear interpolation.
  double r_at(double theta) const { return grid().interpolate(r, theta); }
  double r_at(const ProjPoint& x) const { return r_at(x.angle()); }

  nlohmann::json to_json() const;
  static SpectralData from_json(const nlohmann::json& doc);
};

SpectralData solve_spectral(const MatrixModel& model, double s, const SolverSettings& settings = {});

/// Hat-function average of |cos(offset + u)|^s over u in [-h, h]; the
/// quadrature weight of a node mass at angular offset `offset`. Integrable
/// singularities (s < 0) are removed by substitution.
double delta_power_cell(double offset, double s, double h);

/// int delta(y, x)^s m(dx) for a node-mass measure m on the grid.
double delta_power_integral(const ProjGrid& grid, std::span<const double> masses, double s,
                            double theta_y, std::span<const double> weight = {});

/// r_s^*(y) = int delta(y, x)^s nu_s(dx).
double r_star_integral(const SpectralData& data, const DualPoint& y);

/// max_i |c r_s(x_i) - int delta(y, x_i)^s nu_s^*(dy)| with c the
/// least-squares scale between the solved eigenfunction and its integral
/// representation.
double duality_residual(const SpectralData& data);

/// |nu_s(c r_s) - nu_s^*(c^* r_s^*)| / rho after fitting both solved
/// eigenfunctions to their integral representations.
double conjugation_defect(const SpectralData& data);

struct TiltWeights {
  std::vector<double> weights;  ///< renormalized, sums to 1
  double raw_sum = 0.0;         ///< sum_j p_j e^{s sigma} r(g_j x) / (kappa r(x))
};

/// One-step law of the tilted chain at x.
TiltWeights tilt_kernel(const MatrixModel& model, const SpectralData& data, const ProjPoint& x);

/// Spectral radius of the N x N collocation matrix of R_{s,it}. The phase
/// e^{-itq} is unimodular, so q does not change the result.
double perturbed_gap(const MatrixModel& model, const SpectralData& data, double t, int n,
                     double q = 0.0);

struct KappaEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo kappa(s) from E||G_n||^s and E||G_m||^s with m = floor(n/2),
/// estimate = (E||G_n||^s / E||G_m||^s)^{1/(n-m)}. The ratio cancels the
/// constant in E||G_n||^s ~ C kappa^n. Works for every d.
KappaEstimate empirical_kappa(const MatrixModel& model, double s, int n, const Sampling& sampling);

}  // namespace prm
