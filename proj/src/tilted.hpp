#pragma once

// Shared by the estimators and the diagnostics; not installed.

#include <cmath>
#include <vector>

#include "prm/errors.hpp"
#include "prm/grid.hpp"
#include "prm/model.hpp"
#include "prm/rng.hpp"
#include "prm/spectral.hpp"

namespace prm::detail {

// Tilted one-step kernel on P^1 with exact renormalization.
class Tilted2 {
 public:
  Tilted2(const MatrixModel& model, const SpectralData& data)
      : model_(model), grid_(data.n), r_(data.r), s_(data.s), log_kappa_(std::log(data.kappa)) {
    if (model.dim() != 2) throw UnsupportedDimension(model.dim());
    if (static_cast<int>(data.r.size()) != data.n) throw DomainError("spectral data is incomplete");
  }

  struct Scratch {
    explicit Scratch(std::size_t m) : image(m), log_nr(m), r_img(m), val(m) {}
    std::vector<Eigen::Vector2d> image;
    std::vector<double> log_nr;
    std::vector<double> r_img;
    std::vector<double> val;
  };

  double r_at(const Eigen::Vector2d& v) const { return grid_.interpolate(r_, line_angle(v(0), v(1))); }
  double log_kappa() const { return log_kappa_; }
  double s() const { return s_; }

  /// Fills the scratch with the images of unit v and returns Z(v).
  double evaluate(const Eigen::Vector2d& v, Scratch& sc) const {
    double z = 0.0;
    for (std::size_t j = 0; j < model_.size(); ++j) {
      Eigen::Vector2d w = model_.generator2(j) * v;
      const double nr = w.norm();
      const double lnr = std::log(nr);
      sc.image[j] = w / nr;
      sc.log_nr[j] = lnr;
      sc.r_img[j] = grid_.interpolate(r_, line_angle(w(0), w(1)));
      sc.val[j] = model_.weight(j) * std::exp(s_ * lnr) * sc.r_img[j];
      z += sc.val[j];
    }
    return z;
  }

  std::size_t choose(const Scratch& sc, double z, double u) const {
    const double target = u * z;
    double acc = 0.0;
    const std::size_t m = model_.size();
    for (std::size_t j = 0; j + 1 < m; ++j) {
      acc += sc.val[j];
      if (target < acc) return j;
    }
    return m - 1;
  }

 private:
  const MatrixModel& model_;
  ProjGrid grid_;
  const GridFunction& r_;
  double s_;
  double log_kappa_;
};

struct PathEnd {
  double log_norm = 0.0;
  Eigen::Vector2d unit;
  double r_end = 1.0;
  double weight_log = 0.0;
};

struct NoStep {
  void operator()(std::size_t) const {}
};

/// Runs n tilted steps from unit v0; on_step(j) sees every drawn generator.
template <class OnStep = NoStep>
PathEnd run_tilted(const Tilted2& k, std::size_t m, const Eigen::Vector2d& v0, int n, ChainRng& rng,
                   OnStep&& on_step = {}) {
  Tilted2::Scratch sc(m);
  PathEnd out;
  out.unit = v0;
  double r_here = k.r_at(v0);
  for (int i = 0; i < n; ++i) {
    const double z = k.evaluate(out.unit, sc);
    out.weight_log += std::log(z) - k.log_kappa() - std::log(r_here);
    const std::size_t j = k.choose(sc, z, rng.uniform());
    on_step(j);
    out.unit = sc.image[j];
    out.log_norm += sc.log_nr[j];
    r_here = sc.r_img[j];
  }
  out.r_end = r_here;
  return out;
}

}  // namespace prm::detail
