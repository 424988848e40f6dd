#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prm/geometry.hpp"
#include "prm/model.hpp"
#include "prm/parallel.hpp"
#include "prm/rate.hpp"
#include "prm/spectral.hpp"

namespace prm {

enum class Tail { upper, lower };

Tail parse_tail(const std::string& name);
std::string to_string(Tail tail);

struct Trajectory {
  int n = 0;
  std::vector<ProjPoint> x_path;  ///< x, G_1 x, ..., G_n x
  double log_norm = 0.0;          ///< log |G_n v| for unit v
  std::vector<std::size_t> word;  ///< generator drawn at each step
  double weight_log = 0.0;        ///< sum of log normalization ratios (0 for plain walks)
};

struct LDEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::optional<double> theory;
  std::optional<double> ratio;

  void set_theory(double t);
  nlohmann::json to_json() const;
};

/// Scalar function on a uniform u-grid, linear between nodes and zero
/// outside [u0, u_end] unless a constant extension is requested. The caller
/// asserts integrability of e^{-s u} psi(u).
struct TabulatedFunction {
  double u0 = 0.0;
  double step = 1e-3;
  std::vector<double> values;
  bool extend_left = false;   ///< psi(u) = values.front() for u < u0
  bool extend_right = false;  ///< psi(u) = values.back() for u > u_end
  bool integrable = true;

  double u_end() const { return u0 + step * static_cast<double>(values.size() - 1); }
  double operator()(double u) const;
  /// int e^{-s u} psi(u) du, exact for the piecewise-linear table.
  double laplace(double s) const;

  /// 1 on [a, b] (b may be +inf, a may be -inf), tabulated at `step`.
  static TabulatedFunction indicator(double a, double b, double step = 1e-3);
  /// f(u) on [a, b] at `step`.
  static TabulatedFunction sample(const std::function<double(double)>& f, double a, double b,
                                  double step = 1e-3);
};

/// Plain walk x, G_1 x, ..., G_n x with i.i.d. draws by the model weights.
Trajectory walk(const MatrixModel& model, const ProjPoint& x0, int n, std::uint64_t seed,
                std::uint64_t chain = 0);

/// Walk under the tilted chain Q_s built from the discretized r_s.
///
/// Step j is drawn with probability p_j e^{s sigma(g_j, x)} r(g_j x) / Z(x),
/// normalized exactly; weight_log collects log(Z(x) / (kappa r(x))) so that
/// dP/dQ_s = kappa^n e^{-s S_n} r(x_0) / r(x_n) exp(weight_log) holds exactly.
Trajectory tilted_walk(const MatrixModel& model, const SpectralData& data, const ProjPoint& x0,
                       int n, std::uint64_t seed, std::uint64_t chain = 0);

/// State handed to path functionals during enumeration.
struct PathView {
  const std::vector<std::size_t>& word;
  const Vec& unit;   ///< G_w v / |G_w v|
  double log_norm;   ///< log |G_w v|
};

/// Largest number of words enumerate_* will visit.
inline constexpr double kEnumerationBudget = 2e7;

/// sum over all m^n words of the path probability times h. Path
/// probabilities are products of model weights, or of tilted one-step
/// probabilities when `tilt` is given (d = 2).
double enumerate_expectation(const MatrixModel& model, const ProjPoint& x0, int n,
                             const std::function<double(const PathView&)>& h,
                             const SpectralData* tilt = nullptr);

/// P(log|<f, G_n v>| >= threshold) (upper) or <= (lower) by enumeration.
double enumerate_exact(const MatrixModel& model, const ProjPoint& x0, const DualPoint& f, int n,
                       double threshold, Tail tail, const SpectralData* tilt = nullptr);

/// P(log|<f, G_n v>| >= n q) (or <=) by sampling Q_s with s = data.s.
LDEstimate importance_estimator(const MatrixModel& model, const SpectralData& data,
                                const RateFunction& rate, const ProjPoint& x0, const DualPoint& f,
                                int n, double q, const Sampling& sampling, Tail tail);

/// E[phi(G_n x) psi(log|<f, G_n v>| - n (q + l))] by sampling Q_s, s = data.s.
/// An empty phi means phi = 1.
LDEstimate target_estimator(const MatrixModel& model, const SpectralData& data,
                            const RateFunction& rate, const ProjPoint& x0, const DualPoint& f,
                            int n, double q, double l, const GridFunction& phi,
                            const TabulatedFunction& psi, const Sampling& sampling);

/// Q_s(log|<f, G_n v>| >= n q_t) (or <=) sampled under Q_t and reweighted
/// step by step with the ratio of tilted one-step probabilities.
LDEstimate changed_measure_estimator(const MatrixModel& model, const SpectralData& data_s,
                                     const SpectralData& data_t, const RateFunction& rate,
                                     const ProjPoint& x0, const DualPoint& f, int n,
                                     const Sampling& sampling, Tail tail);

/// word, log_norm, final_angle, weight_log
std::string trajectories_csv(const MatrixModel& model, const std::vector<Trajectory>& paths);

}  // namespace prm
