#include "prm/rate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "prm/errors.hpp"
#include "prm/parallel.hpp"
#include "prm/spectral.hpp"

namespace prm {

namespace {

constexpr int kStencil = 7;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Coefficients in t = (s - s0) / H of the quintic Hermite interpolant.
std::array<double, 6> hermite_coeffs(double f0, double d0, double c0, double f1, double d1,
                                     double c1, double H) {
  const double a = H * d0, b = H * H * c0;
  // remainders after the Taylor part at t = 0; keeps the 1/H^2 scaling from
  // amplifying rounding in f
  const double r = (f1 - f0) - a - 0.5 * b;
  const double e = H * d1 - a - b;
  const double g = H * H * c1 - b;
  return {f0, a, 0.5 * b, 10.0 * r - 4.0 * e + 0.5 * g, -15.0 * r + 7.0 * e - g, 6.0 * r - 3.0 * e + 0.5 * g};
}

// k-th t-derivative of the polynomial at t.
double poly_derivative(const std::array<double, 6>& c, int k, double t) {
  double acc = 0.0;
  for (int p = 5; p >= k; --p) {
    double falling = 1.0;
    for (int j = 0; j < k; ++j) falling *= p - j;
    acc = acc * t + falling * c[p];
  }
  return acc;
}

}  // namespace

std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& xs, int max_order) {
  const int n = static_cast<int>(xs.size());
  if (n == 0 || max_order < 0) throw DomainError("fd_weights needs nodes");
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

RateFunction RateFunction::from_table(std::vector<double> s_grid, std::vector<double> lambda,
                                      std::vector<RatePoint> provenance, int grid_n) {
  const std::size_t n = s_grid.size();
  if (n < kStencil) throw DomainError("rate table needs at least 7 nodes");
  if (lambda.size() != n) throw DomainError("rate table columns differ in length");
  const double step = s_grid[1] - s_grid[0];
  if (!(step > 0.0)) throw DomainError("rate grid must be increasing");
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(s_grid[i] - s_grid[i - 1] - step) > 1e-9 * std::max(1.0, step)) {
      throw DomainError("rate grid must be uniform");
    }
  }
  if (provenance.empty()) {
    provenance.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      provenance[i].s = s_grid[i];
      provenance[i].ok = std::isfinite(lambda[i]);
    }
  }

  RateFunction r;
  r.s_ = std::move(s_grid);
  r.lambda_ = std::move(lambda);
  r.provenance_ = std::move(provenance);
  r.grid_n_ = grid_n;
  r.step_ = step;
  for (auto& d : r.deriv_) d.assign(n, kNaN);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t half = kStencil / 2;
    std::size_t lo = i >= half ? i - half : 0;
    lo = std::min(lo, n - kStencil);
    std::vector<double> xs(kStencil);
    bool clean = true;
    for (int k = 0; k < kStencil; ++k) {
      // offsets in units of the step keep the weights well scaled
      xs[k] = static_cast<double>(lo + k) - static_cast<double>(i);
      clean = clean && std::isfinite(r.lambda_[lo + k]);
    }
    if (!clean) continue;
    const auto w = fd_weights(0.0, xs, 5);
    for (int order = 1; order <= 5; ++order) {
      double acc = 0.0;
      for (int k = 0; k < kStencil; ++k) acc += w[order][k] * r.lambda_[lo + k];
      r.deriv_[order - 1][i] = acc / std::pow(step, order);
    }
  }
  return r;
}

const std::vector<double>& RateFunction::derivative_values(int k) const {
  if (k < 1 || k > 5) throw DomainError("tabulated derivatives cover orders 1..5");
  return deriv_[k - 1];
}

std::vector<double> RateFunction::gaps() const {
  std::vector<double> out;
  for (const auto& p : provenance_) {
    if (!p.ok) out.push_back(p.s);
  }
  return out;
}

std::size_t RateFunction::locate(double s) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(s));
  if (!(s >= s_.front() - slack && s <= s_.back() + slack)) {
    throw DomainError("s = " + fmt(s) + " outside the rate table [" + fmt(s_.front()) + ", " +
                      fmt(s_.back()) + "]");
  }
  const double t = (s - s_.front()) / step_;
  auto i = static_cast<std::ptrdiff_t>(std::floor(t));
  i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(s_.size()) - 2);
  return static_cast<std::size_t>(i);
}

void RateFunction::check_span(std::size_t lo, std::size_t hi, double s) const {
  for (std::size_t i = lo; i <= hi; ++i) {
    if (!std::isfinite(lambda_[i]) || !std::isfinite(deriv_[1][i])) {
      throw DomainError("rate table has a gap near s = " + fmt(s_[i]) + " (query s = " + fmt(s) +
                        ")");
    }
  }
}

double RateFunction::derivative(int k, double s) const {
  if (k < 0 || k > 5) throw DomainError("derivative order must be in 0..5");
  const std::size_t i = locate(s);
  check_span(i, i + 1, s);
  const double H = step_;
  const double t = (s - s_[i]) / H;
  if (k <= 2) {
    const auto c = hermite_coeffs(lambda_[i], deriv_[0][i], deriv_[1][i], lambda_[i + 1],
                                  deriv_[0][i + 1], deriv_[1][i + 1], H);
    return poly_derivative(c, k, t) / std::pow(H, k);
  }
  const auto& d = deriv_[k - 1];
  if (t == 0.0) return d[i];
  return (1.0 - t) * d[i] + t * d[i + 1];
}

double RateFunction::sigma(double s) const {
  const double v = derivative(2, s);
  if (!(v > 0.0)) throw DomainError("Lambda'' is not positive at s = " + fmt(s));
  return std::sqrt(v);
}

std::array<std::size_t, 2> RateFunction::usable() const {
  std::size_t lo = 0, hi = s_.size() - 1;
  while (lo < hi && !std::isfinite(deriv_[1][lo])) ++lo;
  while (hi > lo && !std::isfinite(deriv_[1][hi])) --hi;
  if (lo == hi) throw DomainError("rate table has no usable nodes");
  return {lo, hi};
}

std::array<double, 2> RateFunction::s_range() const {
  const auto [lo, hi] = usable();
  return {s_[lo], s_[hi]};
}

std::array<double, 2> RateFunction::q_range() const {
  const auto [lo, hi] = usable();
  return {deriv_[0][lo], deriv_[0][hi]};
}

nlohmann::json RateFunction::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : provenance_) {
    pts.push_back({{"s", p.s}, {"ok", p.ok}, {"residual", p.residual}, {"iterations", p.iterations},
                   {"message", p.message}});
  }
  auto clean = [](const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
    return a;
  };
  return {{"grid_n", grid_n_},
          {"s", s_},
          {"lambda", clean(lambda_)},
          {"d1", clean(deriv_[0])},
          {"d2", clean(deriv_[1])},
          {"d3", clean(deriv_[2])},
          {"d4", clean(deriv_[3])},
          {"d5", clean(deriv_[4])},
          {"gaps", gaps()},
          {"provenance", pts}};
}

std::string RateFunction::to_csv() const {
  std::ostringstream out;
  out << "s,lambda,d1,d2,d3,d4,d5,solver_residual\n";
  for (std::size_t i = 0; i < s_.size(); ++i) {
    out << fmt(s_[i]) << ',' << fmt(lambda_[i]);
    for (const auto& d : deriv_) out << ',' << fmt(d[i]);
    out << ',' << fmt(provenance_[i].residual) << '\n';
  }
  return out.str();
}

RateFunction build_rate(const MatrixModel& model, double s_lo, double s_hi, double step, int grid_n,
                        double tol, unsigned workers) {
  if (!(step > 0.0) || step > 0.05) throw DomainError("rate step must be in (0, 0.05]");
  if (!(s_hi > s_lo)) throw DomainError("rate interval is empty");
  const auto k_lo = static_cast<long>(std::ceil(s_lo / step - 1e-9));
  const auto k_hi = static_cast<long>(std::floor(s_hi / step + 1e-9));
  if (k_hi - k_lo + 1 < kStencil) throw DomainError("rate interval holds fewer than 7 grid nodes");
  const std::size_t n = static_cast<std::size_t>(k_hi - k_lo + 1);
  std::vector<double> s(n), lam(n, kNaN);
  std::vector<RatePoint> prov(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<double>(k_lo + static_cast<long>(i)) * step;

  SolverSettings settings;
  settings.grid_n = grid_n;
  settings.tol = tol;
  parallel_for(n, workers, [&](std::size_t i) {
    RatePoint& p = prov[i];
    p.s = s[i];
    try {
      const SpectralData d = solve_spectral(model, s[i], settings);
      lam[i] = std::log(d.kappa);
      p.residual = std::max({d.residual_r, d.residual_nu, d.residual_r_star, d.residual_nu_star});
      p.iterations = d.iterations;
    } catch (const Error& e) {
      p.ok = false;
      p.message = e.what();
    }
  });
  RateFunction rate = RateFunction::from_table(std::move(s), std::move(lam), std::move(prov), grid_n);
  const auto& d2 = rate.derivative_values(2);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(d2[i]) && !(d2[i] > 0.0)) {
      throw DomainError("Lambda is not strictly convex at s = " + fmt(rate.s_grid()[i]));
    }
  }
  return rate;
}

LegendreResult legendre(const RateFunction& rate, double q) {
  const auto range = rate.q_range();
  if (!(q >= range[0] && q <= range[1])) {
    throw DomainError("q = " + fmt(q) + " outside the achievable interval [" + fmt(range[0]) + ", " +
                      fmt(range[1]) + "]");
  }
  auto [a, b] = rate.s_range();
  // bisection on the monotone interpolated Lambda'
  double fa = rate.lambda_prime(a) - q;
  if (fa == 0.0) return {a * q - rate.lambda(a), a};
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = rate.lambda_prime(m) - q;
    if (fm == 0.0) {
      a = b = m;
      break;
    }
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  const double s = 0.5 * (a + b);
  return {s * q - rate.lambda(s), s};
}

double cramer_h(const RateFunction& rate, double s, double l) {
  const double q = rate.lambda_prime(s);
  const double base = s * q - rate.lambda(s);
  const auto range = rate.q_range();
  if (!(q + l >= range[0] && q + l <= range[1])) {
    throw DomainError("q + l = " + fmt(q + l) + " leaves the achievable interval [" + fmt(range[0]) +
                      ", " + fmt(range[1]) + "]");
  }
  if (l == 0.0) return 0.0;
  return legendre(rate, q + l).lambda_star - base - s * l;
}

double cramer_series(const RateFunction& rate, double s, double t, int order) {
  if (order < 0 || order > 2) throw DomainError("Cramer series is available up to order 2");
  const double g2 = rate.derivative(2, s);
  const double g3 = rate.derivative(3, s);
  if (!(g2 > 0.0)) throw DomainError("Lambda'' is not positive at s = " + fmt(s));
  double z = g3 / (6.0 * std::pow(g2, 1.5));
  if (order >= 1) {
    const double g4 = rate.derivative(4, s);
    z += (g4 * g2 - 3.0 * g3 * g3) / (24.0 * g2 * g2 * g2) * t;
  }
  if (order >= 2) {
    const double g4 = rate.derivative(4, s);
    const double g5 = rate.derivative(5, s);
    z += (g5 * g2 * g2 - 10.0 * g4 * g3 * g2 + 15.0 * g3 * g3 * g3) / (120.0 * std::pow(g2, 4.5)) *
         t * t;
  }
  return z;
}

}  // namespace prm
