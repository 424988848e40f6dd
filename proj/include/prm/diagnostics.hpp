#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "prm/geometry.hpp"
#include "prm/model.hpp"
#include "prm/parallel.hpp"
#include "prm/rate.hpp"
#include "prm/spectral.hpp"

namespace prm {

/// Mean with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

nlohmann::json to_json(const Estimate& e);

/// Tail probabilities at a sequence of levels and the fitted log-linear rate.
struct DecayProfile {
  std::string abscissa_name;     ///< "r" or "k"
  std::vector<double> abscissa;
  std::vector<double> probs;
  std::vector<double> std_errors;
  std::vector<std::size_t> counts;
  std::size_t samples = 0;
  bool censored = false;         ///< fewer than two levels with >= 50 hits
  std::size_t fit_points = 0;
  double fitted_rate = 0.0;
  double ci_lo = 0.0;            ///< 95% bootstrap interval
  double ci_hi = 0.0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Minimum hits for a level to enter the fit.
inline constexpr std::size_t kMinHits = 50;
/// Steps discarded before a chain position counts as stationary.
inline constexpr int kBurnIn = 200;

/// pi_s-mass of B(y, r) = {x : delta(y, x) <= r} from tilted chains after
/// burn-in; fitted_rate is the slope of log mass against log r.
DecayProfile regularity_profile(const MatrixModel& model, const SpectralData& data, const DualPoint& y,
                                const std::vector<double>& r_grid, const Sampling& sampling);

/// Q_s^x(delta(y, G_n x) <= e^{-eps k}) for k = 1..k_max; fitted_rate is c in e^{-c k}.
DecayProfile regularity_decay(const MatrixModel& model, const SpectralData& data, const ProjPoint& x0,
                              const DualPoint& y, double epsilon, int n, int k_max,
                              const Sampling& sampling);

struct CltResult {
  int n = 0;
  double ks_distance = 0.0;
  double mean_err = 0.0;     ///< |mean (1/n) log|<f, G_n v>| - Lambda'(s)|
  double mean_err_se = 0.0;
  double target = 0.0;       ///< Lambda'(s)
  double sigma = 0.0;
  std::size_t used = 0;
  std::size_t dropped = 0;   ///< paths with delta = 0

  nlohmann::json to_json() const;
};

CltResult clt_diagnostic(const MatrixModel& model, const SpectralData& data, const RateFunction& rate,
                         const ProjPoint& x0, const DualPoint& f, int n, const Sampling& sampling);

struct LyapunovResult {
  int n = 0;
  std::size_t samples = 0;
  Estimate lambda1;   ///< E log(||G_n|| / ||G_{n/2}||) / (n - n/2)
  Estimate lambda2;
  Estimate sum;       ///< same increment of log ||wedge^2 G_n||
  Estimate gap;       ///< lambda1 - lambda2, per-path differences

  nlohmann::json to_json() const;
};

/// Exponents of G_n under Q_s^x (d = 2).
LyapunovResult lyapunov_spectrum(const MatrixModel& model, const SpectralData& data, int n,
                                 const Sampling& sampling,
                                 const ProjPoint& x0 = ProjPoint::basis(2, 0));

struct CartanRow {
  int n = 0;
  Estimate log_ratio;         ///< log(a22 / a11) of G_n
  Estimate density_step;      ///< distance between density points at this and the previous n
  Estimate coefficient_gap;   ///< | |G_n v| / ||G_n|| - delta(density point at the last n, x) |
};

struct CartanTable {
  std::vector<CartanRow> rows;
  Estimate slope;  ///< per-path least-squares slope of log(a22 / a11) against n

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

CartanTable cartan_convergence(const MatrixModel& model, const SpectralData& data, const ProjPoint& x0,
                               const std::vector<int>& n_list, const Sampling& sampling);

struct IwasawaRow {
  int n = 0;
  Estimate moment;  ///< E |L(G_n^*) e_1 - L(G_N^*) e_1|^alpha with N = max n_list
};

struct IwasawaTable {
  double alpha = 0.1;
  std::vector<IwasawaRow> rows;
  double log_slope = 0.0;   ///< slope of log moment against n
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t majorant_checks = 0;
  std::size_t majorant_violations = 0;
  double worst_margin = 0.0;  ///< max over checks of lhs - rhs (<= 0 when all hold)
  std::size_t dropped = 0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Convergence of L(G_n^*) e_1 under Q_s^x. Along each path the increment
/// bound |L(G_{n+m}^*) e_1 - L(G_n^*) e_1| <= sum_{j=n}^{n+m-1} ||wedge^2 G_j||
/// / |G_j e_1|^2 N(g_{j+1})^2 is checked for 1 <= n, m <= majorant_horizon.
IwasawaTable iwasawa_convergence(const MatrixModel& model, const SpectralData& data,
                                 const std::vector<int>& n_list, double alpha,
                                 const Sampling& sampling,
                                 const ProjPoint& x0 = ProjPoint::basis(2, 0),
                                 int majorant_horizon = 20);

/// L(g^*) e_1 = g^T g e_1 / |g e_1|^2 (d = 2).
Eigen::Vector2d iwasawa_first_column(const Eigen::Matrix2d& g);

}  // namespace prm
