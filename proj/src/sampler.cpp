#include "prm/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "prm/errors.hpp"
#include "prm/rng.hpp"
#include "tilted.hpp"

namespace prm {

Tail parse_tail(const std::string& name) {
  if (name == "upper") return Tail::upper;
  if (name == "lower") return Tail::lower;
  throw ConfigError("tail must be 'upper' or 'lower', got '" + name + "'");
}

std::string to_string(Tail tail) { return tail == Tail::upper ? "upper" : "lower"; }

void LDEstimate::set_theory(double t) {
  theory = t;
  ratio = value / t;
}

nlohmann::json LDEstimate::to_json() const {
  nlohmann::json j{{"value", value}, {"std_error", std_error}, {"samples", samples}, {"seed", seed}};
  j["theory"] = theory ? nlohmann::json(*theory) : nlohmann::json(nullptr);
  j["ratio"] = ratio ? nlohmann::json(*ratio) : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------

double TabulatedFunction::operator()(double u) const {
  if (values.empty() || std::isnan(u)) return 0.0;
  if (u < u0) return extend_left ? values.front() : 0.0;
  const double end = u_end();
  if (u > end) return extend_right ? values.back() : 0.0;
  if (values.size() == 1) return values.front();
  const double t = (u - u0) / step;
  auto k = static_cast<std::size_t>(t);
  if (k >= values.size() - 1) return values.back();
  const double fr = t - static_cast<double>(k);
  return (1.0 - fr) * values[k] + fr * values[k + 1];
}

namespace {

// int_a^b e^{-s u} (alpha + beta (u - a)) du
double laplace_linear(double a, double b, double fa, double fb, double s) {
  const double w = b - a;
  if (s == 0.0) return 0.5 * w * (fa + fb);
  const double sw = s * w;
  if (std::abs(sw) < 1e-4) {
    // series in sw keeps the small-step limit accurate
    const double base = std::exp(-s * a) * w;
    const double i0 = 1.0 - sw / 2.0 + sw * sw / 6.0 - sw * sw * sw / 24.0;
    const double i1 = 0.5 - sw / 3.0 + sw * sw / 8.0 - sw * sw * sw / 30.0;
    return base * (fa * (i0 - i1) + fb * i1);
  }
  const double ea = std::exp(-s * a), eb = std::exp(-s * b);
  // int_0^w e^{-s t} dt and int_0^w t e^{-s t} dt / w
  const double i0 = (ea - eb) / s;
  const double i1 = (ea - eb * (1.0 + sw)) / (s * sw);
  return fa * (i0 - i1) + fb * i1;
}

}  // namespace

double TabulatedFunction::laplace(double s) const {
  if (!integrable) throw DomainError("psi is flagged as not integrable");
  if (values.empty()) return 0.0;
  double total = 0.0;
  std::vector<double> parts;
  parts.reserve(values.size() + 2);
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double a = u0 + step * static_cast<double>(k);
    parts.push_back(laplace_linear(a, a + step, values[k], values[k + 1], s));
  }
  if (extend_left && values.front() != 0.0) {
    if (!(s < 0.0)) throw DomainError("left-extended psi needs s < 0 to be integrable");
    parts.push_back(values.front() * std::exp(-s * u0) / (-s));
  }
  if (extend_right && values.back() != 0.0) {
    if (!(s > 0.0)) throw DomainError("right-extended psi needs s > 0 to be integrable");
    parts.push_back(values.back() * std::exp(-s * u_end()) / s);
  }
  total = pairwise_sum(parts);
  return total;
}

TabulatedFunction TabulatedFunction::indicator(double a, double b, double step) {
  if (!(a < b)) throw DomainError("indicator needs a < b");
  if (std::isinf(a) && std::isinf(b)) throw DomainError("indicator of the whole line is not integrable");
  TabulatedFunction t;
  t.step = step;
  if (std::isinf(b)) {
    t.u0 = a;
    t.values = {1.0, 1.0};
    t.extend_right = true;
  } else if (std::isinf(a)) {
    t.u0 = b - step;
    t.values = {1.0, 1.0};
    t.extend_left = true;
  } else {
    const auto k = static_cast<std::size_t>(std::llround((b - a) / step));
    t.u0 = a;
    t.step = (b - a) / static_cast<double>(std::max<std::size_t>(k, 1));
    t.values.assign(std::max<std::size_t>(k, 1) + 1, 1.0);
  }
  return t;
}

TabulatedFunction TabulatedFunction::sample(const std::function<double(double)>& f, double a,
                                            double b, double step) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw DomainError("sample needs finite a < b");
  const auto k = std::max<std::size_t>(static_cast<std::size_t>(std::llround((b - a) / step)), 1);
  TabulatedFunction t;
  t.u0 = a;
  t.step = (b - a) / static_cast<double>(k);
  t.values.resize(k + 1);
  for (std::size_t i = 0; i <= k; ++i) t.values[i] = f(a + t.step * static_cast<double>(i));
  return t;
}

// ---------------------------------------------------------------------------

namespace {

using detail::PathEnd;
using detail::Tilted2;
using detail::run_tilted;

Eigen::Vector2d unit2(const ProjPoint& x) {
  if (x.dim() != 2) throw UnsupportedDimension(x.dim());
  return Eigen::Vector2d(x.rep()(0), x.rep()(1));
}

// log |<f, u>| for unit f and u; -inf when orthogonal.
double log_coefficient(const Eigen::Vector2d& f, const Eigen::Vector2d& u) {
  const double c = std::abs(f.dot(u));
  return c > 0.0 ? std::log(c) : -std::numeric_limits<double>::infinity();
}

bool in_tail(double value, double threshold, Tail tail) {
  return tail == Tail::upper ? value >= threshold : value <= threshold;
}

LDEstimate finish(std::vector<double>& contrib, const Sampling& sampling) {
  const SampleStats st = summarize(contrib);
  LDEstimate e;
  e.value = st.mean;
  e.std_error = st.std_error;
  e.samples = contrib.size();
  e.seed = sampling.seed;
  return e;
}

void check_sampling(const Sampling& sampling) {
  if (sampling.samples < 2) throw DomainError("estimators need at least 2 samples");
}

void check_q(const RateFunction& rate, double q) {
  const auto range = rate.q_range();
  if (!(q >= range[0] && q <= range[1])) {
    throw DomainError("q outside the achievable interval of the rate table");
  }
}

}  // namespace

Trajectory walk(const MatrixModel& model, const ProjPoint& x0, int n, std::uint64_t seed,
                std::uint64_t chain) {
  if (n < 1) throw DomainError("walk length must be at least 1");
  if (x0.dim() != model.dim()) throw DomainError("starting point dimension differs from the model");
  ChainRng rng(seed, chain);
  Trajectory t;
  t.n = n;
  t.x_path.reserve(n + 1);
  t.x_path.push_back(x0);
  t.word.reserve(n);
  Vec v = x0.rep();
  for (int i = 0; i < n; ++i) {
    const std::size_t j = model.draw(rng.uniform());
    Vec w = model.generator(j) * v;
    const double nr = w.norm();
    t.log_norm += std::log(nr);
    v = w / nr;
    t.word.push_back(j);
    t.x_path.emplace_back(v);
  }
  return t;
}

Trajectory tilted_walk(const MatrixModel& model, const SpectralData& data, const ProjPoint& x0,
                       int n, std::uint64_t seed, std::uint64_t chain) {
  if (n < 1) throw DomainError("walk length must be at least 1");
  const Tilted2 k(model, data);
  Tilted2::Scratch sc(model.size());
  ChainRng rng(seed, chain);
  Trajectory t;
  t.n = n;
  t.x_path.reserve(n + 1);
  t.x_path.push_back(x0);
  t.word.reserve(n);
  Eigen::Vector2d v = unit2(x0);
  double r_here = k.r_at(v);
  for (int i = 0; i < n; ++i) {
    const double z = k.evaluate(v, sc);
    t.weight_log += std::log(z) - k.log_kappa() - std::log(r_here);
    const std::size_t j = k.choose(sc, z, rng.uniform());
    v = sc.image[j];
    t.log_norm += sc.log_nr[j];
    r_here = sc.r_img[j];
    t.word.push_back(j);
    t.x_path.emplace_back(Vec(v));
  }
  return t;
}

double enumerate_expectation(const MatrixModel& model, const ProjPoint& x0, int n,
                             const std::function<double(const PathView&)>& h,
                             const SpectralData* tilt) {
  if (n < 0) throw DomainError("enumeration length must be nonnegative");
  const double words = std::pow(static_cast<double>(model.size()), n);
  if (words > kEnumerationBudget) {
    throw BudgetError("enumeration needs " + std::to_string(words) + " words; budget is 2e7", words);
  }
  if (tilt && model.dim() != 2) throw UnsupportedDimension(model.dim());
  if (x0.dim() != model.dim()) throw DomainError("starting point dimension differs from the model");

  std::vector<std::size_t> word;
  word.reserve(n);
  std::vector<double> leaves;
  leaves.reserve(static_cast<std::size_t>(words));
  std::function<void(const Vec&, double, double)> dfs = [&](const Vec& unit, double log_norm,
                                                            double prob) {
    if (static_cast<int>(word.size()) == n) {
      leaves.push_back(prob * h(PathView{word, unit, log_norm}));
      return;
    }
    std::vector<double> step_p(model.weights());
    if (tilt) step_p = tilt_kernel(model, *tilt, ProjPoint(unit)).weights;
    for (std::size_t j = 0; j < model.size(); ++j) {
      Vec w = model.generator(j) * unit;
      const double nr = w.norm();
      word.push_back(j);
      dfs(w / nr, log_norm + std::log(nr), prob * step_p[j]);
      word.pop_back();
    }
  };
  dfs(x0.rep(), 0.0, 1.0);
  return pairwise_sum(leaves);
}

double enumerate_exact(const MatrixModel& model, const ProjPoint& x0, const DualPoint& f, int n,
                       double threshold, Tail tail, const SpectralData* tilt) {
  if (f.dim() != model.dim()) throw DomainError("dual point dimension differs from the model");
  const Vec& fv = f.rep();
  return enumerate_expectation(
      model, x0, n,
      [&](const PathView& p) {
        const double c = std::abs(fv.dot(p.unit));
        const double coef = c > 0.0 ? p.log_norm + std::log(c) : -std::numeric_limits<double>::infinity();
        return in_tail(coef, threshold, tail) ? 1.0 : 0.0;
      },
      tilt);
}

LDEstimate importance_estimator(const MatrixModel& model, const SpectralData& data,
                                const RateFunction& rate, const ProjPoint& x0, const DualPoint& f,
                                int n, double q, const Sampling& sampling, Tail tail) {
  return target_estimator(model, data, rate, x0, f, n, q, 0.0, {},
                          tail == Tail::upper ? TabulatedFunction::indicator(0.0, INFINITY)
                                              : TabulatedFunction::indicator(-INFINITY, 0.0),
                          sampling);
}

LDEstimate target_estimator(const MatrixModel& model, const SpectralData& data,
                            const RateFunction& rate, const ProjPoint& x0, const DualPoint& f,
                            int n, double q, double l, const GridFunction& phi,
                            const TabulatedFunction& psi, const Sampling& sampling) {
  if (n < 1) throw DomainError("horizon n must be at least 1");
  check_sampling(sampling);
  check_q(rate, q + l);
  if (!psi.integrable) throw DomainError("psi is flagged as not integrable");
  const Tilted2 k(model, data);
  const Eigen::Vector2d v0 = unit2(x0);
  if (f.dim() != 2) throw UnsupportedDimension(f.dim());
  const Eigen::Vector2d fv(f.rep()(0), f.rep()(1));
  const double log_r0 = std::log(k.r_at(v0));
  const double level = static_cast<double>(n) * (q + l);
  const double s = data.s;
  std::optional<ProjGrid> phi_grid;
  if (!phi.empty()) phi_grid.emplace(static_cast<int>(phi.size()));

  std::vector<double> contrib(sampling.samples);
  parallel_for(sampling.samples, sampling.workers, [&](std::size_t c) {
    ChainRng rng(sampling.seed, c);
    const PathEnd e = run_tilted(k, model.size(), v0, n, rng);
    const double coef = e.log_norm + log_coefficient(fv, e.unit);
    // delta = 0 gives coef = -inf; psi then takes its left-extension value
    const double psi_val = psi(coef - level);
    if (psi_val == 0.0) {
      contrib[c] = 0.0;
      return;
    }
    const double phi_val = phi_grid ? phi_grid->interpolate(phi, line_angle(e.unit(0), e.unit(1))) : 1.0;
    const double log_w = n * k.log_kappa() - s * e.log_norm + log_r0 - std::log(e.r_end) + e.weight_log;
    contrib[c] = std::exp(log_w) * phi_val * psi_val;
  });
  return finish(contrib, sampling);
}

LDEstimate changed_measure_estimator(const MatrixModel& model, const SpectralData& data_s,
                                     const SpectralData& data_t, const RateFunction& rate,
                                     const ProjPoint& x0, const DualPoint& f, int n,
                                     const Sampling& sampling, Tail tail) {
  if (n < 1) throw DomainError("horizon n must be at least 1");
  check_sampling(sampling);
  const double q_t = rate.lambda_prime(data_t.s);
  const Tilted2 ks(model, data_s);
  const Tilted2 kt(model, data_t);
  const Eigen::Vector2d v0 = unit2(x0);
  if (f.dim() != 2) throw UnsupportedDimension(f.dim());
  const Eigen::Vector2d fv(f.rep()(0), f.rep()(1));
  const double level = static_cast<double>(n) * q_t;
  const std::size_t m = model.size();

  std::vector<double> contrib(sampling.samples);
  parallel_for(sampling.samples, sampling.workers, [&](std::size_t c) {
    ChainRng rng(sampling.seed, c);
    Tilted2::Scratch st(m), ss(m);
    Eigen::Vector2d v = v0;
    double log_norm = 0.0, log_ratio = 0.0;
    for (int i = 0; i < n; ++i) {
      const double zt = kt.evaluate(v, st);
      const double zs = ks.evaluate(v, ss);
      const std::size_t j = kt.choose(st, zt, rng.uniform());
      log_ratio += std::log(ss.val[j] / zs) - std::log(st.val[j] / zt);
      v = st.image[j];
      log_norm += st.log_nr[j];
    }
    const double coef = log_norm + log_coefficient(fv, v);
    contrib[c] = in_tail(coef, level, tail) ? std::exp(log_ratio) : 0.0;
  });
  return finish(contrib, sampling);
}

std::string trajectories_csv(const MatrixModel& model, const std::vector<Trajectory>& paths) {
  std::ostringstream out;
  out << "word,log_norm,final_angle,weight_log\n";
  char buf[64];
  for (const auto& t : paths) {
    for (std::size_t j : t.word) out << model.name(j);
    std::snprintf(buf, sizeof buf, ",%.17g,", t.log_norm);
    out << buf;
    if (!t.x_path.empty() && t.x_path.back().dim() == 2) {
      std::snprintf(buf, sizeof buf, "%.17g", t.x_path.back().angle());
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", t.weight_log);
    out << buf;
  }
  return out.str();
}

}  // namespace prm
