#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "prm/geometry.hpp"
#include "prm/rate.hpp"
#include "prm/sampler.hpp"
#include "prm/spectral.hpp"

namespace prm {

/// Inputs shared by the asymptotic evaluators. Give exactly one of s and q.
struct TheoremInput {
  ProjPoint x = ProjPoint::basis(2, 0);
  DualPoint y = DualPoint::basis(2, 0);
  int n = 1;
  std::optional<double> s;
  std::optional<double> q;
  double l = 0.0;
  double a1 = 0.0;
  double a2 = 1.0;
  GridFunction phi;                    ///< empty means phi = 1
  std::optional<TabulatedFunction> psi;
};

/// Value of an expansion with its factors kept apart for auditing.
struct TheoryValue {
  std::string formula;
  double value = 0.0;
  double log_value = 0.0;
  double s = 0.0;
  double q = 0.0;
  double l = 0.0;
  int n = 0;
  double prefactor = 0.0;       ///< everything except exp(-n * exponent)
  double exponent = 0.0;        ///< rate per step in exp(-n * exponent)
  double sigma = 0.0;
  double space_integral = 0.0;  ///< r*_s(y), or the phi / pi_t integral
  double psi_integral = 1.0;    ///< int e^{-s u} psi(u) du, or the interval factor
  double rho = 0.0;
  double r_x = 0.0;

  nlohmann::json to_json() const;
};

TheoryValue bahadur_rao_upper(const SpectralData& data, const RateFunction& rate, const TheoremInput& in);
TheoryValue bahadur_rao_lower(const SpectralData& data, const RateFunction& rate, const TheoremInput& in);
/// Interval [a1, a2] + n(q + l); a2 may be +inf for s > 0 and a1 -inf for s < 0.
TheoryValue llt_theory(const SpectralData& data, const RateFunction& rate, const TheoremInput& in);
TheoryValue target_theory(const SpectralData& data, const RateFunction& rate, const TheoremInput& in);
/// Q_s(log|<f, G_n v>| >= n q_t) for t > s, or <= for t < s.
TheoryValue changed_measure_theory(const SpectralData& data_s, const SpectralData& data_t,
                                   const RateFunction& rate, const TheoremInput& in);

}  // namespace prm
