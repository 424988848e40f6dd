#include "prm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "prm/errors.hpp"
#include "prm/rng.hpp"
#include "tilted.hpp"

namespace prm {

using detail::Tilted2;
using detail::run_tilted;

nlohmann::json to_json(const Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

namespace {

constexpr int kBootstrap = 200;
// stream index for bootstrap draws, far from any chain index
constexpr std::uint64_t kBootstrapStream = 0xb0075712a9ull;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Eigen::Vector2d unit2(const Vec& v) { return Eigen::Vector2d(v(0), v(1)); }

Estimate estimate_of(std::span<const double> x) {
  const SampleStats st = summarize(x);
  return {st.mean, st.std_error};
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::array<double, 2> percentile_interval(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto at = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {at(0.025), at(0.975)};
}

// Fills probabilities from per-chain depths (depth d means the first d
// nested levels were hit) and fits log p against x.
void fill_profile(DecayProfile& p, const std::vector<int>& depth, const std::vector<double>& x,
                  bool negate, std::uint64_t seed) {
  const std::size_t levels = p.abscissa.size();
  const std::size_t n = depth.size();
  p.samples = n;
  std::vector<std::size_t> hist(levels + 1, 0);
  for (int d : depth) ++hist[static_cast<std::size_t>(d)];
  auto counts_from = [&](const std::vector<std::size_t>& h) {
    std::vector<std::size_t> c(levels, 0);
    std::size_t above = 0;
    for (std::size_t k = levels; k-- > 0;) {
      above += h[k + 1];
      c[k] = above;
    }
    return c;
  };
  p.counts = counts_from(hist);
  p.probs.resize(levels);
  p.std_errors.resize(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    const double pr = static_cast<double>(p.counts[k]) / static_cast<double>(n);
    p.probs[k] = pr;
    p.std_errors[k] = std::sqrt(pr * (1.0 - pr) / static_cast<double>(n));
  }
  std::vector<std::size_t> used;
  for (std::size_t k = 0; k < levels; ++k) {
    if (p.counts[k] >= kMinHits) used.push_back(k);
  }
  p.fit_points = used.size();
  if (used.size() < 2) {
    p.censored = true;
    return;
  }
  auto fit = [&](const std::vector<std::size_t>& counts) {
    std::vector<double> xs, ys;
    for (std::size_t k : used) {
      xs.push_back(x[k]);
      ys.push_back(std::log(std::max<double>(static_cast<double>(counts[k]), 0.5) / static_cast<double>(n)));
    }
    const double slope = ols_slope(xs, ys);
    return negate ? -slope : slope;
  };
  p.fitted_rate = fit(p.counts);
  // bootstrap over chains: resample the depth histogram
  std::vector<double> cdf(levels + 1);
  double acc = 0.0;
  for (std::size_t k = 0; k <= levels; ++k) {
    acc += static_cast<double>(hist[k]) / static_cast<double>(n);
    cdf[k] = acc;
  }
  std::vector<double> reps(kBootstrap);
  for (int b = 0; b < kBootstrap; ++b) {
    ChainRng rng(derive_seed(seed, kBootstrapStream), static_cast<std::uint64_t>(b));
    std::vector<std::size_t> h(levels + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      const auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      ++h[std::min(k, levels)];
    }
    reps[b] = fit(counts_from(h));
  }
  const auto ci = percentile_interval(reps);
  p.ci_lo = ci[0];
  p.ci_hi = ci[1];
}

// 2x2 product with a running log scale.
struct Scaled2 {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  double log_scale = 0.0;

  void left_multiply(const Eigen::Matrix2d& g) {
    m = g * m;
    const double s = m.cwiseAbs().maxCoeff();
    m /= s;
    log_scale += std::log(s);
  }
};

double norm2(const Eigen::Matrix2d& m) {
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m);
  return svd.singularValues()(0);
}

void require_plane(const MatrixModel& model) {
  if (model.dim() != 2) throw UnsupportedDimension(model.dim());
}

}  // namespace

Eigen::Vector2d iwasawa_first_column(const Eigen::Matrix2d& g) {
  const Eigen::Vector2d ge1 = g.col(0);
  return g.transpose() * ge1 / ge1.squaredNorm();
}

nlohmann::json DecayProfile::to_json() const {
  return {{"abscissa_name", abscissa_name}, {"abscissa", abscissa},   {"probs", probs},
          {"std_errors", std_errors},       {"counts", counts},       {"samples", samples},
          {"censored", censored},           {"fit_points", fit_points},
          {"fitted_rate", fitted_rate},     {"ci", {ci_lo, ci_hi}}};
}

std::string DecayProfile::to_csv() const {
  std::ostringstream out;
  out << abscissa_name << ",prob,std_error,count\n";
  for (std::size_t k = 0; k < abscissa.size(); ++k) {
    out << fmt(abscissa[k]) << ',' << fmt(probs[k]) << ',' << fmt(std_errors[k]) << ',' << counts[k] << '\n';
  }
  return out.str();
}

DecayProfile regularity_profile(const MatrixModel& model, const SpectralData& data, const DualPoint& y,
                                const std::vector<double>& r_grid, const Sampling& sampling) {
  require_plane(model);
  if (r_grid.empty()) throw DomainError("r_grid is empty");
  for (std::size_t k = 0; k < r_grid.size(); ++k) {
    if (!(r_grid[k] > 0.0 && r_grid[k] <= 1.0)) throw DomainError("r_grid values must lie in (0, 1]");
    if (k > 0 && !(r_grid[k] < r_grid[k - 1])) throw DomainError("r_grid must be decreasing");
  }
  if (sampling.samples < 2) throw DomainError("regularity_profile needs samples");
  const Tilted2 kern(model, data);
  const Eigen::Vector2d fy = unit2(y.rep());
  const Eigen::Vector2d v0(1.0, 0.0);
  std::vector<int> depth(sampling.samples);
  parallel_for(sampling.samples, sampling.workers, [&](std::size_t c) {
    ChainRng rng(sampling.seed, c);
    const auto end = run_tilted(kern, model.size(), v0, kBurnIn, rng);
    const double d = std::abs(fy.dot(end.unit));
    int k = 0;
    while (k < static_cast<int>(r_grid.size()) && d <= r_grid[k]) ++k;
    depth[c] = k;
  });
  DecayProfile p;
  p.abscissa_name = "r";
  p.abscissa = r_grid;
  std::vector<double> x(r_grid.size());
  for (std::size_t k = 0; k < r_grid.size(); ++k) x[k] = std::log(r_grid[k]);
  fill_profile(p, depth, x, false, sampling.seed);
  return p;
}

DecayProfile regularity_decay(const MatrixModel& model, const SpectralData& data, const ProjPoint& x0,
                              const DualPoint& y, double epsilon, int n, int k_max,
                              const Sampling& sampling) {
  require_plane(model);
  if (k_max < 1 || k_max > n) throw DomainError("need 1 <= k_max <= n");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (sampling.samples < 2) throw DomainError("regularity_decay needs samples");
  const Tilted2 kern(model, data);
  const Eigen::Vector2d fy = unit2(y.rep());
  const Eigen::Vector2d v0 = unit2(x0.rep());
  std::vector<int> depth(sampling.samples);
  parallel_for(sampling.samples, sampling.workers, [&](std::size_t c) {
    ChainRng rng(sampling.seed, c);
    const auto end = run_tilted(kern, model.size(), v0, n, rng);
    const double d = std::abs(fy.dot(end.unit));
    int k = 0;
    while (k < k_max && d <= std::exp(-epsilon * (k + 1))) ++k;
    depth[c] = k;
  });
  DecayProfile p;
  p.abscissa_name = "k";
  for (int k = 1; k <= k_max; ++k) p.abscissa.push_back(k);
  fill_profile(p, depth, p.abscissa, true, sampling.seed);
  return p;
}

nlohmann::json CltResult::to_json() const {
  return {{"n", n},       {"ks_distance", ks_distance}, {"mean_err", mean_err}, {"mean_err_se", mean_err_se},
          {"target", target}, {"sigma", sigma},         {"used", used},         {"dropped", dropped}};
}

CltResult clt_diagnostic(const MatrixModel& model, const SpectralData& data, const RateFunction& rate,
                         const ProjPoint& x0, const DualPoint& f, int n, const Sampling& sampling) {
  require_plane(model);
  if (n < 50) throw DomainError("clt_diagnostic needs n >= 50");
  if (sampling.samples < 2) throw DomainError("clt_diagnostic needs samples");
  const Tilted2 kern(model, data);
  const Eigen::Vector2d fv = unit2(f.rep());
  const Eigen::Vector2d v0 = unit2(x0.rep());
  std::vector<double> coef(sampling.samples);
  parallel_for(sampling.samples, sampling.workers, [&](std::size_t c) {
    ChainRng rng(sampling.seed, c);
    const auto end = run_tilted(kern, model.size(), v0, n, rng);
    const double d = std::abs(fv.dot(end.unit));
    coef[c] = d > 0.0 ? end.log_norm + std::log(d) : -std::numeric_limits<double>::infinity();
  });
  CltResult out;
  out.n = n;
  out.target = rate.lambda_prime(data.s);
  out.sigma = rate.sigma(data.s);
  std::vector<double> per_step, z;
  for (double c : coef) {
    if (std::isinf(c)) {
      ++out.dropped;
      continue;
    }
    per_step.push_back(c / n);
    z.push_back((c - n * out.target) / (out.sigma * std::sqrt(static_cast<double>(n))));
  }
  out.used = z.size();
  if (out.used < 2) throw DomainError("too few usable paths for the CLT diagnostic");
  const SampleStats st = summarize(per_step);
  out.mean_err = std::abs(st.mean - out.target);
  out.mean_err_se = st.std_error;
  std::sort(z.begin(), z.end());
  const double m = static_cast<double>(z.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
    ks = std::max({ks, static_cast<double>(i + 1) / m - cdf, cdf - static_cast<double>(i) / m});
  }
  out.ks_distance = ks;
  return out;
}

nlohmann::json LyapunovResult::to_json() const {
  return {{"n", n},
          {"samples", samples},
          {"lambda1", prm::to_json(lambda1)},
          {"lambda2", prm::to_json(lambda2)},
          {"sum", prm::to_json(sum)},
          {"gap", prm::to_json(gap)}};
}

LyapunovResult lyapunov_spectrum(const MatrixModel& model, const SpectralData& data, int n,
                                 const Sampling& sampling, const ProjPoint& x0) {
  require_plane(model);
  if (n < 100) throw DomainError("lyapunov_spectrum needs n >= 100");
  if (sampling.samples < 2) throw DomainError("lyapunov_spectrum needs samples");
  const Tilted2 kern(model, data);
  std::vector<double> log_det(model.size());
  for (std::size_t j = 0; j < model.size(); ++j) log_det[j] = std::log(std::abs(model.generator2(j).determinant()));
  const Eigen::Vector2d v0 = unit2(x0.rep());
  // Exponents come from the increment over the second half of each path so
  // that the O(1) transient of log||G_k|| cancels.
  const int half = n / 2;
  std::vector<double> l1(sampling.samples), sum(sampling.samples), l2(sampling.samples), gap(sampling.samples);
  parallel_for(sampling.samples, sampling.workers, [&](std::size_t c) {
    ChainRng rng(sampling.seed, c);
    Scaled2 prod;
    double det = 0.0, det_half = 0.0, norm_half = 0.0;
    int steps = 0;
    run_tilted(kern, model.size(), v0, n, rng, [&](std::size_t j) {
      prod.left_multiply(model.generator2(j));
      det += log_det[j];
      if (++steps == half) {
        det_half = det;
        norm_half = prod.log_scale + std::log(norm2(prod.m));
      }
    });
    const double len = n - half;
    const double a = (prod.log_scale + std::log(norm2(prod.m)) - norm_half) / len;
    const double b = (det - det_half) / len;
    l1[c] = a;
    sum[c] = b;
    l2[c] = b - a;
    gap[c] = 2.0 * a - b;
  });
  LyapunovResult out;
  out.n = n;
  out.samples = sampling.samples;
  out.lambda1 = estimate_of(l1);
  out.lambda2 = estimate_of(l2);
  out.sum = estimate_of(sum);
  out.gap = estimate_of(gap);
  return out;
}

nlohmann::json CartanTable::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows) {
    rs.push_back({{"n", r.n},
                  {"log_ratio", prm::to_json(r.log_ratio)},
                  {"density_step", prm::to_json(r.density_step)},
                  {"coefficient_gap", prm::to_json(r.coefficient_gap)}});
  }
  return {{"rows", rs}, {"slope", prm::to_json(slope)}};
}

std::string CartanTable::to_csv() const {
  std::ostringstream out;
  out << "n,log_ratio,log_ratio_se,density_step,density_step_se,coefficient_gap,coefficient_gap_se\n";
  for (const auto& r : rows) {
    out << r.n << ',' << fmt(r.log_ratio.value) << ',' << fmt(r.log_ratio.std_error) << ','
        << fmt(r.density_step.value) << ',' << fmt(r.density_step.std_error) << ','
        << fmt(r.coefficient_gap.value) << ',' << fmt(r.coefficient_gap.std_error) << '\n';
  }
  return out.str();
}

namespace {

void check_n_list(const std::vector<int>& n_list) {
  if (n_list.size() < 2) throw DomainError("n_list needs at least two entries");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw DomainError("n_list entries must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw DomainError("n_list must be increasing");
  }
}

}  // namespace

CartanTable cartan_convergence(const MatrixModel& model, const SpectralData& data, const ProjPoint& x0,
                               const std::vector<int>& n_list, const Sampling& sampling) {
  require_plane(model);
  check_n_list(n_list);
  if (sampling.samples < 2) throw DomainError("cartan_convergence needs samples");
  const Tilted2 kern(model, data);
  const Eigen::Vector2d v0 = unit2(x0.rep());
  const std::size_t rows = n_list.size();
  const std::size_t count = sampling.samples;
  std::vector<double> log_det(model.size());
  for (std::size_t j = 0; j < model.size(); ++j) log_det[j] = std::log(std::abs(model.generator2(j).determinant()));
  std::vector<double> ratio(count * rows), step(count * rows), cgap(count * rows), slope(count);
  std::vector<double> xs(n_list.begin(), n_list.end());
  parallel_for(count, sampling.workers, [&](std::size_t c) {
    ChainRng rng(sampling.seed, c);
    Scaled2 prod;
    double det = 0.0;
    std::size_t row = 0;
    int steps = 0;
    std::vector<Eigen::Vector2d> density(rows);
    std::vector<double> coef(rows);
    run_tilted(kern, model.size(), v0, n_list.back(), rng, [&](std::size_t j) {
      prod.left_multiply(model.generator2(j));
      det += log_det[j];
      ++steps;
      if (row < rows && steps == n_list[row]) {
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(prod.m, Eigen::ComputeFullV);
        const double top = svd.singularValues()(0);
        // a22 a11 = |det G_n|; the scaled product has lost a22 to rounding
        ratio[c * rows + row] = det - 2.0 * (prod.log_scale + std::log(top));
        // first right singular vector of G_n is k e_1 for G_n^* = k a k'
        density[row] = svd.matrixV().col(0);
        coef[row] = (prod.m * v0).norm() / top;
        ++row;
      }
    });
    const auto sine = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
      return std::abs(a(0) * b(1) - a(1) * b(0));
    };
    // the density point at the last n stands in for the limit
    const Eigen::Vector2d& limit = density.back();
    for (std::size_t r = 0; r < rows; ++r) {
      step[c * rows + r] = r == 0 ? 0.0 : sine(density[r], density[r - 1]);
      cgap[c * rows + r] = std::abs(coef[r] - std::abs(limit.dot(v0)));
    }
    std::vector<double> ys(ratio.begin() + static_cast<std::ptrdiff_t>(c * rows),
                           ratio.begin() + static_cast<std::ptrdiff_t>((c + 1) * rows));
    slope[c] = ols_slope(xs, ys);
  });
  CartanTable out;
  std::vector<double> col(count);
  for (std::size_t r = 0; r < rows; ++r) {
    CartanRow row;
    row.n = n_list[r];
    for (std::size_t c = 0; c < count; ++c) col[c] = ratio[c * rows + r];
    row.log_ratio = estimate_of(col);
    for (std::size_t c = 0; c < count; ++c) col[c] = step[c * rows + r];
    row.density_step = estimate_of(col);
    for (std::size_t c = 0; c < count; ++c) col[c] = cgap[c * rows + r];
    row.coefficient_gap = estimate_of(col);
    out.rows.push_back(row);
  }
  out.slope = estimate_of(slope);
  return out;
}

nlohmann::json IwasawaTable::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows) rs.push_back({{"n", r.n}, {"moment", prm::to_json(r.moment)}});
  return {{"alpha", alpha},
          {"rows", rs},
          {"log_slope", log_slope},
          {"ci", {ci_lo, ci_hi}},
          {"majorant_checks", majorant_checks},
          {"majorant_violations", majorant_violations},
          {"worst_margin", worst_margin},
          {"dropped", dropped}};
}

std::string IwasawaTable::to_csv() const {
  std::ostringstream out;
  out << "n,moment,moment_se\n";
  for (const auto& r : rows) out << r.n << ',' << fmt(r.moment.value) << ',' << fmt(r.moment.std_error) << '\n';
  return out.str();
}

IwasawaTable iwasawa_convergence(const MatrixModel& model, const SpectralData& data,
                                 const std::vector<int>& n_list, double alpha, const Sampling& sampling,
                                 const ProjPoint& x0, int majorant_horizon) {
  require_plane(model);
  check_n_list(n_list);
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  if (majorant_horizon < 0) throw DomainError("majorant horizon must be nonnegative");
  if (sampling.samples < 2) throw DomainError("iwasawa_convergence needs samples");
  const Tilted2 kern(model, data);
  const Eigen::Vector2d v0 = unit2(x0.rep());
  const int n_ref = n_list.back();
  const int total = std::max(n_ref, 2 * majorant_horizon);
  const std::size_t rows = n_list.size() - 1;  // the reference row is identically zero
  const std::size_t count = sampling.samples;
  std::vector<double> moment(count * rows);
  std::vector<std::size_t> violations(count, 0), checks(count, 0);
  std::vector<double> margin(count, -std::numeric_limits<double>::infinity());
  constexpr double eps = std::numeric_limits<double>::epsilon();

  parallel_for(count, sampling.workers, [&](std::size_t c) {
    ChainRng rng(sampling.seed, c);
    Scaled2 prod;
    std::vector<Eigen::Vector2d> L(total + 1);
    std::vector<double> ratio(total + 1, 0.0);  // ||wedge^2 G_j|| / |G_j e_1|^2
    std::vector<double> n_next(total + 1, 0.0); // N(g_{j+1})^2
    int steps = 0;
    run_tilted(kern, model.size(), v0, total, rng, [&](std::size_t j) {
      const double nj = model.functionals(j).n_g;
      n_next[steps] = nj * nj;
      prod.left_multiply(model.generator2(j));
      ++steps;
      L[steps] = iwasawa_first_column(prod.m);
      ratio[steps] = std::abs(prod.m.determinant()) / prod.m.col(0).squaredNorm();
    });
    for (std::size_t r = 0; r < rows; ++r) {
      moment[c * rows + r] = std::pow((L[n_list[r]] - L[n_ref]).norm(), alpha);
    }
    // increment bound, n >= 1
    for (int n = 1; n <= majorant_horizon; ++n) {
      double bound = 0.0;
      for (int m = 1; m <= majorant_horizon; ++m) {
        const int j = n + m - 1;
        bound += ratio[j] * n_next[j];
        const double lhs = (L[n + m] - L[n]).norm();
        const double slack = 64.0 * eps * (L[n + m].norm() + L[n].norm());
        margin[c] = std::max(margin[c], lhs - bound);
        ++checks[c];
        if (lhs > bound + slack) ++violations[c];
      }
    }
  });

  IwasawaTable out;
  out.alpha = alpha;
  std::vector<double> col(count);
  std::vector<double> means(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < count; ++c) col[c] = moment[c * rows + r];
    IwasawaRow row;
    row.n = n_list[r];
    row.moment = estimate_of(col);
    means[r] = row.moment.value;
    out.rows.push_back(row);
  }
  for (std::size_t c = 0; c < count; ++c) {
    out.majorant_checks += checks[c];
    out.majorant_violations += violations[c];
  }
  out.worst_margin = *std::max_element(margin.begin(), margin.end());
  if (rows >= 2) {
    std::vector<double> xs(n_list.begin(), n_list.begin() + static_cast<std::ptrdiff_t>(rows));
    auto log_means = [&](const std::vector<double>& m) {
      std::vector<double> y(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) y[i] = std::log(m[i]);
      return y;
    };
    out.log_slope = ols_slope(xs, log_means(means));
    std::vector<double> reps(kBootstrap);
    for (int b = 0; b < kBootstrap; ++b) {
      ChainRng rng(derive_seed(sampling.seed, kBootstrapStream), static_cast<std::uint64_t>(b));
      std::vector<double> acc(rows, 0.0);
      for (std::size_t i = 0; i < count; ++i) {
        const auto c = static_cast<std::size_t>(rng.uniform() * static_cast<double>(count));
        for (std::size_t r = 0; r < rows; ++r) acc[r] += moment[c * rows + r];
      }
      reps[b] = ols_slope(xs, log_means(acc));
    }
    const auto ci = percentile_interval(reps);
    out.ci_lo = ci[0];
    out.ci_hi = ci[1];
  }
  return out;
}

}  // namespace prm
