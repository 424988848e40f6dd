#include "prm/ldp.hpp"

#include <cmath>
#include <numbers>

#include "prm/errors.hpp"

namespace prm {

nlohmann::json TheoryValue::to_json() const {
  return {{"formula", formula},     {"value", value},         {"log_value", log_value},
          {"s", s},                 {"q", q},                 {"l", l},
          {"n", n},                 {"prefactor", prefactor}, {"exponent", exponent},
          {"sigma", sigma},         {"rho", rho},             {"r_x", r_x},
          {"space_integral", space_integral},                 {"psi_integral", psi_integral}};
}

namespace {

struct Resolved {
  double s;
  double q;
};

Resolved resolve(const SpectralData& data, const RateFunction& rate, const TheoremInput& in) {
  if (in.s.has_value() == in.q.has_value()) throw DomainError("give exactly one of s and q");
  if (in.n < 1) throw DomainError("n must be at least 1");
  Resolved r{};
  if (in.s) {
    r.s = *in.s;
    r.q = rate.lambda_prime(r.s);
  } else {
    r.q = *in.q;
    r.s = legendre(rate, r.q).s_of_q;
  }
  if (std::abs(r.s - data.s) > 1e-9) {
    throw DomainError("spectral data was solved at s = " + std::to_string(data.s) +
                      " but the input needs s = " + std::to_string(r.s));
  }
  return r;
}

// exp(-n Lambda*(q + l)) with Lambda*(q + l) = Lambda*(q) + s l + h_s(l)
double rate_exponent(const RateFunction& rate, double s, double q, double l) {
  const double base = s * q - rate.lambda(s);
  return base + s * l + cramer_h(rate, s, l);
}

TheoryValue assemble(std::string name, double s, double q, const TheoremInput& in, double exponent,
                     double prefactor) {
  TheoryValue v;
  v.formula = std::move(name);
  v.s = s;
  v.q = q;
  v.l = in.l;
  v.n = in.n;
  v.exponent = exponent;
  v.prefactor = prefactor;
  v.log_value = std::log(prefactor) - in.n * exponent;
  v.value = std::exp(v.log_value);
  return v;
}

TheoryValue tail_value(const SpectralData& data, const RateFunction& rate, const TheoremInput& in,
                       bool upper) {
  const Resolved r = resolve(data, rate, in);
  if (upper && !(r.s > 0.0)) {
    if (r.s == 0.0) throw DomainError("q equals the LLN point; rate is zero");
    throw DomainError("upper-tail expansion needs s > 0; use bahadur_rao_lower");
  }
  if (!upper && !(r.s < 0.0)) {
    if (r.s == 0.0) throw DomainError("q equals the LLN point; rate is zero");
    throw DomainError("lower-tail expansion needs s < 0; use bahadur_rao_upper");
  }
  const double sigma = rate.sigma(r.s);
  const double r_x = data.r_at(in.x);
  const double r_star = r_star_integral(data, in.y);
  const double n = in.n;
  const double prefactor =
      r_x * r_star / data.rho / (std::abs(r.s) * sigma * std::sqrt(2.0 * std::numbers::pi * n));
  TheoryValue v = assemble(upper ? "bahadur_rao_upper" : "bahadur_rao_lower", r.s, r.q, in,
                           rate_exponent(rate, r.s, r.q, in.l), prefactor);
  v.sigma = sigma;
  v.r_x = r_x;
  v.rho = data.rho;
  v.space_integral = r_star;
  v.psi_integral = 1.0;
  return v;
}

}  // namespace

TheoryValue bahadur_rao_upper(const SpectralData& data, const RateFunction& rate, const TheoremInput& in) {
  return tail_value(data, rate, in, true);
}

TheoryValue bahadur_rao_lower(const SpectralData& data, const RateFunction& rate, const TheoremInput& in) {
  return tail_value(data, rate, in, false);
}

TheoryValue llt_theory(const SpectralData& data, const RateFunction& rate, const TheoremInput& in) {
  if (!(in.a1 < in.a2)) throw DomainError("interval needs a1 < a2");
  const Resolved r = resolve(data, rate, in);
  TheoryValue v = tail_value(data, rate, in, r.s > 0.0);
  const double factor = r.s > 0.0 ? std::exp(-r.s * in.a1) - std::exp(-r.s * in.a2)
                                   : std::exp(-r.s * in.a2) - std::exp(-r.s * in.a1);
  if (!std::isfinite(factor)) throw DomainError("interval is unbounded on the growing side");
  v.formula = "llt";
  v.psi_integral = factor;
  v.prefactor *= factor;
  v.log_value = std::log(v.prefactor) - in.n * v.exponent;
  v.value = std::exp(v.log_value);
  return v;
}

TheoryValue target_theory(const SpectralData& data, const RateFunction& rate, const TheoremInput& in) {
  if (!in.psi) throw DomainError("target_theory needs psi");
  if (!in.psi->integrable) throw DomainError("psi is flagged as not integrable; refusing");
  const Resolved r = resolve(data, rate, in);
  if (r.s == 0.0) throw DomainError("q equals the LLN point; rate is zero");
  const double sigma = rate.sigma(r.s);
  const double r_x = data.r_at(in.x);
  const ProjGrid grid = data.grid();
  GridFunction phi_nodes;
  if (!in.phi.empty()) {
    const ProjGrid pg(static_cast<int>(in.phi.size()));
    phi_nodes = grid.sample([&](double th) { return pg.interpolate(in.phi, th); });
  }
  const double space = delta_power_integral(grid, data.nu, r.s, in.y.angle(), phi_nodes);
  const double lap = in.psi->laplace(r.s);
  const double n = in.n;
  const double prefactor =
      r_x / data.rho / (sigma * std::sqrt(2.0 * std::numbers::pi * n)) * space * lap;
  TheoryValue v = assemble("target", r.s, r.q, in, rate_exponent(rate, r.s, r.q, in.l), prefactor);
  v.sigma = sigma;
  v.r_x = r_x;
  v.rho = data.rho;
  v.space_integral = space;
  v.psi_integral = lap;
  return v;
}

TheoryValue changed_measure_theory(const SpectralData& data_s, const SpectralData& data_t,
                                   const RateFunction& rate, const TheoremInput& in) {
  const double s = data_s.s;
  const double t = data_t.s;
  if (s == t) throw DomainError("changed-measure expansion needs t != s");
  if (data_s.n != data_t.n) throw DomainError("spectral data on different grids");
  if (in.n < 1) throw DomainError("n must be at least 1");
  const double q_s = rate.lambda_prime(s);
  const double q_t = rate.lambda_prime(t);
  const double star_s = s * q_s - rate.lambda(s);
  const double star_t = t * q_t - rate.lambda(t);
  const double exponent = star_t - star_s - s * (q_t - q_s);
  const double sigma_t = rate.sigma(t);
  const ProjGrid grid = data_t.grid();
  // int delta^t (r_s / r_t) d pi_t = sum nu_t delta^t r_s / rho_t
  const double space = delta_power_integral(grid, data_t.nu, t, in.y.angle(), data_s.r) / data_t.rho;
  const double r_t = data_t.r_at(in.x);
  const double r_s = data_s.r_at(in.x);
  const double n = in.n;
  const double prefactor =
      r_t / r_s / (std::abs(t - s) * sigma_t * std::sqrt(2.0 * std::numbers::pi * n)) * space;
  TheoremInput copy = in;
  copy.l = 0.0;
  TheoryValue v = assemble(t > s ? "changed_measure_upper" : "changed_measure_lower", t, q_t, copy,
                           exponent, prefactor);
  v.sigma = sigma_t;
  v.r_x = r_t / r_s;
  v.rho = data_t.rho;
  v.space_integral = space;
  return v;
}

}  // namespace prm
