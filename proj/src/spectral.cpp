#include "prm/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "prm/errors.hpp"
#include "prm/geometry.hpp"
#include "prm/rng.hpp"

namespace prm {

namespace {

void require_plane(const MatrixModel& model) {
  if (model.dim() != 2) throw UnsupportedDimension(model.dim());
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double sum(std::span<const double> x) { return pairwise_sum(x); }

}  // namespace

TransferOperator::TransferOperator(const MatrixModel& model, double s, const ProjGrid& grid,
                                   bool conjugate)
    : n_(grid.size()), per_row_(2 * static_cast<int>(model.size())) {
  require_plane(model);
  cols_.resize(static_cast<std::size_t>(n_) * per_row_);
  vals_.resize(cols_.size());
  for (int i = 0; i < n_; ++i) {
    const double th = grid.angle(i);
    const Eigen::Vector2d v(std::cos(th), std::sin(th));
    std::size_t e = static_cast<std::size_t>(i) * per_row_;
    for (std::size_t j = 0; j < model.size(); ++j) {
      const Eigen::Vector2d w = (conjugate ? model.transpose2(j) : model.generator2(j)) * v;
      const double nr = w.norm();
      const double factor = model.weight(j) * std::exp(s * std::log(nr));
      const auto st = grid.locate(line_angle(w(0), w(1)));
      cols_[e] = st.lo;
      vals_[e++] = factor * st.w_lo;
      cols_[e] = st.hi;
      vals_[e++] = factor * st.w_hi;
    }
  }
}

void TransferOperator::apply(std::span<const double> in, std::span<double> out) const {
  for (int i = 0; i < n_; ++i) {
    double acc = 0.0;
    const std::size_t base = static_cast<std::size_t>(i) * per_row_;
    for (int k = 0; k < per_row_; ++k) acc += vals_[base + k] * in[cols_[base + k]];
    out[i] = acc;
  }
}

void TransferOperator::apply_transpose(std::span<const double> in, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < n_; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * per_row_;
    for (int k = 0; k < per_row_; ++k) out[cols_[base + k]] += vals_[base + k] * in[i];
  }
}

Mat TransferOperator::dense() const {
  Mat m = Mat::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * per_row_;
    for (int k = 0; k < per_row_; ++k) m(i, cols_[base + k]) += vals_[base + k];
  }
  return m;
}

GridFunction apply_transfer(const MatrixModel& model, double s, const ProjGrid& grid,
                            std::span<const double> fn, bool conjugate) {
  if (static_cast<int>(fn.size()) != grid.size()) throw DomainError("grid function size mismatch");
  TransferOperator op(model, s, grid, conjugate);
  GridFunction out(grid.size());
  op.apply(fn, out);
  return out;
}

namespace {

struct EigenPair {
  double kappa = 0.0;
  GridFunction right;  // max = 1
  GridFunction left;   // sums to 1
  double residual_right = 0.0;
  double residual_left = 0.0;
  int iterations = 0;
};

EigenPair perron_pair(const TransferOperator& op, const SolverSettings& cfg) {
  const int n = op.size();
  EigenPair out;
  GridFunction r(n, 1.0), y(n);
  double kappa = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    op.apply(r, y);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += r[i] * y[i];
      den += r[i] * r[i];
    }
    const double k_new = num / den;
    if (!(k_new > 0.0)) throw ConvergenceError("transfer operator lost positivity", k_new);
    residual = 0.0;
    for (int i = 0; i < n; ++i) residual = std::max(residual, std::abs(y[i] - k_new * r[i]));
    residual /= k_new * max_abs(r);
    const double change = std::abs(k_new - kappa);
    kappa = k_new;
    const double scale = max_abs(y);
    for (int i = 0; i < n; ++i) r[i] = y[i] / scale;
    if (change < cfg.tol * kappa && residual <= cfg.tol) break;
  }
  if (it == cfg.max_iter) throw ConvergenceError("power iteration for r_s did not converge", residual);
  // r was refreshed after the last residual check; recompute on the returned vector.
  op.apply(r, y);
  residual = 0.0;
  for (int i = 0; i < n; ++i) residual = std::max(residual, std::abs(y[i] - kappa * r[i]));
  residual /= kappa;
  if (residual > 10.0 * cfg.tol) throw ConvergenceError("r_s residual above 10 tol", residual);

  GridFunction w(n, 1.0 / n), z(n);
  double residual_left = std::numeric_limits<double>::infinity();
  int jt = 0;
  for (; jt < cfg.max_iter; ++jt) {
    op.apply_transpose(w, z);
    residual_left = 0.0;
    for (int i = 0; i < n; ++i) residual_left += std::abs(z[i] - kappa * w[i]);
    residual_left /= kappa;
    const double total = sum(z);
    for (int i = 0; i < n; ++i) w[i] = z[i] / total;
    if (residual_left <= cfg.tol) break;
  }
  if (jt == cfg.max_iter) {
    throw ConvergenceError("power iteration for nu_s did not converge", residual_left);
  }
  op.apply_transpose(w, z);
  residual_left = 0.0;
  for (int i = 0; i < n; ++i) residual_left += std::abs(z[i] - kappa * w[i]);
  residual_left /= kappa;
  if (residual_left > 10.0 * cfg.tol) throw ConvergenceError("nu_s residual above 10 tol", residual_left);

  out.kappa = kappa;
  out.right = std::move(r);
  out.left = std::move(w);
  out.residual_right = residual;
  out.residual_left = residual_left;
  out.iterations = it + jt;
  return out;
}

}  // namespace

SpectralData solve_spectral(const MatrixModel& model, double s, const SolverSettings& settings) {
  require_plane(model);
  if (!(settings.tol > 0.0)) throw DomainError("solver tolerance must be positive");
  if (s < kMinTilt) throw DomainError("tilt below the supported minimum -0.5");
  const ProjGrid grid(settings.grid_n);
  const TransferOperator op(model, s, grid, false);
  const TransferOperator op_star(model, s, grid, true);
  EigenPair direct = perron_pair(op, settings);
  EigenPair conj = perron_pair(op_star, settings);

  SpectralData out;
  out.s = s;
  out.n = grid.size();
  out.kappa = direct.kappa;
  out.kappa_star = conj.kappa;
  out.r = std::move(direct.right);
  out.nu = std::move(direct.left);
  out.r_star = std::move(conj.right);
  out.nu_star = std::move(conj.left);
  out.residual_r = direct.residual_right;
  out.residual_nu = direct.residual_left;
  out.residual_r_star = conj.residual_right;
  out.residual_nu_star = conj.residual_left;
  out.iterations = direct.iterations + conj.iterations;
  for (double v : out.r) {
    if (!(v > 0.0)) throw ConvergenceError("eigenfunction r_s is not strictly positive", v);
  }
  std::vector<double> prod(out.n);
  for (int i = 0; i < out.n; ++i) prod[i] = out.nu[i] * out.r[i];
  out.rho = sum(prod);
  out.pi.resize(out.n);
  for (int i = 0; i < out.n; ++i) out.pi[i] = prod[i] / out.rho;
  return out;
}

nlohmann::json SpectralData::to_json() const {
  return {{"s", s},
          {"n", n},
          {"kappa", kappa},
          {"kappa_star", kappa_star},
          {"rho", rho},
          {"r", r},
          {"nu", nu},
          {"r_star", r_star},
          {"nu_star", nu_star},
          {"pi", pi},
          {"residual_r", residual_r},
          {"residual_nu", residual_nu},
          {"residual_r_star", residual_r_star},
          {"residual_nu_star", residual_nu_star},
          {"iterations", iterations}};
}

SpectralData SpectralData::from_json(const nlohmann::json& doc) {
  SpectralData d;
  d.s = doc.at("s").get<double>();
  d.n = doc.at("n").get<int>();
  d.kappa = doc.at("kappa").get<double>();
  d.kappa_star = doc.at("kappa_star").get<double>();
  d.rho = doc.at("rho").get<double>();
  d.r = doc.at("r").get<GridFunction>();
  d.nu = doc.at("nu").get<GridFunction>();
  d.r_star = doc.at("r_star").get<GridFunction>();
  d.nu_star = doc.at("nu_star").get<GridFunction>();
  d.pi = doc.at("pi").get<GridFunction>();
  d.residual_r = doc.at("residual_r").get<double>();
  d.residual_nu = doc.at("residual_nu").get<double>();
  d.residual_r_star = doc.at("residual_r_star").get<double>();
  d.residual_nu_star = doc.at("residual_nu_star").get<double>();
  d.iterations = doc.at("iterations").get<int>();
  for (const auto* f : {&d.r, &d.nu, &d.r_star, &d.nu_star, &d.pi}) {
    if (static_cast<int>(f->size()) != d.n) throw ConfigError("spectral data arrays have wrong length");
  }
  return d;
}

// ---------------------------------------------------------------------------
// delta^s quadrature

namespace {

constexpr std::array<double, 8> kGaussNodes{
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights{
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

// (sin t / t)^s - 1 + s t^2 / 6
double sinc_power_tail(double t, double s) {
  if (t < 1e-4) return 0.0;
  return std::expm1(s * std::log(std::sin(t) / t)) + s * t * t / 6.0;
}

// int_{t0}^{t1} t^{s+k} (sin t / t)^s dt. The first two Taylor terms of the
// sinc power are integrated exactly; the rest uses v = t^p, p = s + 1 + k,
// which removes the endpoint singularity.
double power_moment(double t0, double t1, double s, int k) {
  const double p = s + 1.0 + k;
  const double v0 = std::pow(t0, p);
  const double v1 = std::pow(t1, p);
  const double exact = (v1 - v0) / p - s / 6.0 * (std::pow(t1, p + 2.0) - std::pow(t0, p + 2.0)) / (p + 2.0);
  const double half = 0.5 * (v1 - v0);
  const double mid = 0.5 * (v1 + v0);
  double acc = 0.0;
  for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
    const double v = mid + half * kGaussNodes[q];
    acc += kGaussWeights[q] * sinc_power_tail(std::pow(v, 1.0 / p), s);
  }
  return exact + acc * half / p;
}

}  // namespace

double delta_power_cell(double offset, double s, double h) {
  if (s == 0.0) return 1.0;
  if (s <= -1.0) throw DomainError("delta^s is not integrable for s <= -1");
  if (!(h > 0.0)) throw DomainError("cell half-width must be positive");
  const double zero = std::remainder(std::numbers::pi / 2 - offset, std::numbers::pi);
  std::array<double, 4> cuts{-h, 0.0, h, h};
  int nc = 3;
  if (zero > -h && zero < h && zero != 0.0) {
    cuts = zero < 0.0 ? std::array<double, 4>{-h, zero, 0.0, h} : std::array<double, 4>{-h, 0.0, zero, h};
    nc = 4;
  }
  double total = 0.0;
  for (int k = 0; k + 1 < nc; ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    if (b <= a) continue;
    const double side_u = (a + b) < 0.0 ? -1.0 : 1.0;   // sign of u on the piece
    const double side_t = (a + b) < 2.0 * zero ? -1.0 : 1.0;  // u = zero + side_t * t
    // hat(u) = 1 - side_u u / h = c0 + c1 t
    const double c0 = 1.0 - side_u * zero / h;
    const double c1 = -side_u * side_t / h;
    const double t0 = std::min(std::abs(a - zero), std::abs(b - zero));
    const double t1 = std::max(std::abs(a - zero), std::abs(b - zero));
    if (t0 >= 2.0 * (b - a)) {
      // zero far away: smooth integrand, plain Gauss in u
      double acc = 0.0;
      for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
        const double u = 0.5 * (a + b) + 0.5 * (b - a) * kGaussNodes[q];
        acc += kGaussWeights[q] * (1.0 - std::abs(u) / h) * std::pow(std::abs(std::cos(offset + u)), s);
      }
      total += 0.5 * (b - a) * acc;
      continue;
    }
    total += c0 * power_moment(t0, t1, s, 0) + c1 * power_moment(t0, t1, s, 1);
  }
  return total / h;
}

double delta_power_integral(const ProjGrid& grid, std::span<const double> masses, double s,
                            double theta_y, std::span<const double> weight) {
  if (static_cast<int>(masses.size()) != grid.size()) throw DomainError("mass vector size mismatch");
  if (!weight.empty() && weight.size() != masses.size()) throw DomainError("weight size mismatch");
  std::vector<double> terms(masses.size());
  for (int i = 0; i < grid.size(); ++i) {
    if (masses[i] == 0.0) continue;
    const double w = weight.empty() ? 1.0 : weight[i];
    terms[i] = masses[i] * w * delta_power_cell(grid.angle(i) - theta_y, s, grid.spacing());
  }
  return pairwise_sum(terms);
}

double r_star_integral(const SpectralData& data, const DualPoint& y) {
  if (y.dim() != 2) throw UnsupportedDimension(y.dim());
  return delta_power_integral(data.grid(), data.nu, data.s, y.angle());
}

namespace {

// R(x_i) = sum_j K(i - j) m_j with K(k) = cell(k h); circulant on the grid.
GridFunction circulant_integral(const ProjGrid& grid, std::span<const double> masses, double s) {
  const int n = grid.size();
  std::vector<double> kernel(n);
  for (int k = 0; k < n; ++k) kernel[k] = delta_power_cell(grid.angle(k), s, grid.spacing());
  GridFunction out(n);
  std::vector<double> terms(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int k = i - j;
      if (k < 0) k += n;
      terms[j] = kernel[k] * masses[j];
    }
    out[i] = pairwise_sum(terms);
  }
  return out;
}

double fit_scale(std::span<const double> f, std::span<const double> target) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += f[i] * target[i];
    den += f[i] * f[i];
  }
  return num / den;
}

}  // namespace

double duality_residual(const SpectralData& data) {
  const ProjGrid grid = data.grid();
  const GridFunction rep = circulant_integral(grid, data.nu_star, data.s);
  const double c = fit_scale(data.r, rep);
  double worst = 0.0;
  for (int i = 0; i < data.n; ++i) worst = std::max(worst, std::abs(c * data.r[i] - rep[i]));
  return worst;
}

double conjugation_defect(const SpectralData& data) {
  const ProjGrid grid = data.grid();
  const GridFunction rep = circulant_integral(grid, data.nu_star, data.s);
  const GridFunction rep_star = circulant_integral(grid, data.nu, data.s);
  const double c = fit_scale(data.r, rep);
  const double c_star = fit_scale(data.r_star, rep_star);
  std::vector<double> a(data.n), b(data.n);
  for (int i = 0; i < data.n; ++i) {
    a[i] = data.nu[i] * c * data.r[i];
    b[i] = data.nu_star[i] * c_star * data.r_star[i];
  }
  const double lhs = pairwise_sum(a);
  const double rhs = pairwise_sum(b);
  return std::abs(lhs - rhs) / std::abs(lhs);
}

TiltWeights tilt_kernel(const MatrixModel& model, const SpectralData& data, const ProjPoint& x) {
  require_plane(model);
  const ProjGrid grid = data.grid();
  const Eigen::Vector2d v = x.rep();
  TiltWeights out;
  out.weights.resize(model.size());
  double z = 0.0;
  for (std::size_t j = 0; j < model.size(); ++j) {
    const Eigen::Vector2d w = model.generator2(j) * v;
    const double val = model.weight(j) * std::exp(data.s * std::log(w.norm())) *
                       grid.interpolate(data.r, line_angle(w(0), w(1)));
    out.weights[j] = val;
    z += val;
  }
  for (double& w : out.weights) w /= z;
  out.raw_sum = z / (data.kappa * data.r_at(x.angle()));
  return out;
}

double perturbed_gap(const MatrixModel& model, const SpectralData& data, double t, int n, double) {
  require_plane(model);
  const ProjGrid grid(n);
  const double s = data.s;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double th = grid.angle(i);
    const Eigen::Vector2d v(std::cos(th), std::sin(th));
    double z = 0.0;
    std::vector<std::complex<double>> row(n, 0.0);
    for (std::size_t j = 0; j < model.size(); ++j) {
      const Eigen::Vector2d w = model.generator2(j) * v;
      const double sigma = std::log(w.norm());
      const double ang = line_angle(w(0), w(1));
      const double base = model.weight(j) * std::exp(s * sigma) * data.r_at(ang);
      z += base;
      const std::complex<double> phase = std::polar(1.0, t * sigma);
      const auto st = grid.locate(ang);
      row[st.lo] += base * phase * st.w_lo;
      row[st.hi] += base * phase * st.w_hi;
    }
    for (int k = 0; k < n; ++k) m(i, k) = row[k] / z;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigenvalue solver failed", 0.0);
  double radius = 0.0;
  for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(solver.eigenvalues()(k)));
  return radius;
}

KappaEstimate empirical_kappa(const MatrixModel& model, double s, int n, const Sampling& sampling) {
  if (n < 2) throw DomainError("empirical kappa needs n >= 2");
  if (sampling.samples < 2) throw DomainError("empirical kappa needs at least 2 samples");
  const int half = n / 2;
  const std::size_t count = sampling.samples;
  std::vector<double> log_full(count), log_half(count);
  parallel_for(count, sampling.workers, [&](std::size_t c) {
    ChainRng rng(sampling.seed, c);
    ScaledProduct prod(model.dim());
    for (int k = 1; k <= n; ++k) {
      prod.left_multiply(model.generator(model.draw(rng.uniform())));
      if (k == half) log_half[c] = s * prod.log_norm();
    }
    log_full[c] = s * prod.log_norm();
  });
  // E e^{X} with a common shift to avoid overflow
  const double shift_full = *std::max_element(log_full.begin(), log_full.end());
  const double shift_half = *std::max_element(log_half.begin(), log_half.end());
  std::vector<double> a(count), b(count);
  for (std::size_t c = 0; c < count; ++c) {
    a[c] = std::exp(log_full[c] - shift_full);
    b[c] = std::exp(log_half[c] - shift_half);
  }
  const SampleStats sa = summarize(a);
  const SampleStats sb = summarize(b);
  const double cov = covariance(a, b) / static_cast<double>(count);
  const double span = static_cast<double>(n - half);
  const double log_ratio = (std::log(sa.mean) + shift_full - std::log(sb.mean) - shift_half) / span;
  // delta method on log(mean_a) - log(mean_b)
  const double var_log = sa.std_error * sa.std_error / (sa.mean * sa.mean) +
                         sb.std_error * sb.std_error / (sb.mean * sb.mean) -
                         2.0 * cov / (sa.mean * sb.mean);
  KappaEstimate out;
  out.estimate = std::exp(log_ratio);
  out.std_error = out.estimate * std::sqrt(std::max(var_log, 0.0)) / span;
  out.samples = count;
  out.seed = sampling.seed;
  return out;
}

}  // namespace prm
