#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace prm {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Operator norm, smallest singular value and N(g) = max(||g||, ||g^-1||).
struct MatrixFunctionals {
  double norm = 0.0;
  double iota = 0.0;
  double n_g = 0.0;
};

/// Throws InvalidModel when g is singular.
MatrixFunctionals matrix_functionals(const Mat& g);

struct ModelOptions {
  /// Accept m = 1; such a law cannot be strongly irreducible.
  bool allow_single_generator = false;
};

/// Finite-support law on GL(d, R): generators g_1..g_m with weights p_1..p_m.
///
/// Immutable after construction. Singular values of each generator are cached
/// because samplers touch them on every step.
class MatrixModel {
 public:
  MatrixModel(std::vector<Mat> generators, std::vector<double> weights,
              ModelOptions options = {}, std::vector<std::string> names = {});

  int dim() const { return dim_; }
  std::size_t size() const { return generators_.size(); }

  const Mat& generator(std::size_t j) const { return generators_[j]; }
  const std::vector<Mat>& generators() const { return generators_; }
  /// Fixed-size copy, valid only when dim() == 2.
  const Eigen::Matrix2d& generator2(std::size_t j) const { return generators2_[j]; }
  const Eigen::Matrix2d& transpose2(std::size_t j) const { return transposes2_[j]; }

  double weight(std::size_t j) const { return weights_[j]; }
  const std::vector<double>& weights() const { return weights_; }
  const MatrixFunctionals& functionals(std::size_t j) const { return functionals_[j]; }

  /// Index j with cumulative weight exceeding u in [0, 1).
  std::size_t draw(double u) const;

  const std::string& name(std::size_t j) const { return names_[j]; }
  std::string word_name(const std::vector<std::size_t>& word) const;

  const ModelOptions& options() const { return options_; }

  nlohmann::json to_json() const;
  /// Strict parse: unknown keys are errors.
  static MatrixModel from_json(const nlohmann::json& doc);
  static MatrixModel load(const std::filesystem::path& path);

 private:
  int dim_ = 0;
  std::vector<Mat> generators_;
  std::vector<Eigen::Matrix2d> generators2_;
  std::vector<Eigen::Matrix2d> transposes2_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  std::vector<MatrixFunctionals> functionals_;
  std::vector<std::string> names_;
  ModelOptions options_;
};

struct ValidationReport {
  /// Product (written left to right as a matrix product) that is proximal.
  std::optional<std::string> proximal_witness;
  std::vector<std::size_t> witness_word;
  double witness_gap = 0.0;
  bool irreducibility_pass = false;
  std::size_t distinct_directions = 0;
  std::size_t words_scanned = 0;
  /// (s, beta) -> sum_j p_j ||g_j||^(s+beta) iota(g_j)^(-beta)
  std::map<std::pair<double, double>, double> moment_values;
  double eta = 0.0;
  double n_g_moment = 0.0;

  bool usable_for_theory() const { return proximal_witness.has_value() && irreducibility_pass; }
  nlohmann::json to_json() const;
};

/// Relative gap |lambda_1| - |lambda_2| required to call a product proximal.
inline constexpr double kProximalGap = 1e-9;
/// Two dominant directions count as distinct above this angular distance.
inline constexpr double kDistinctDirection = 1e-6;

ValidationReport validate_model(const MatrixModel& model, double s, double beta, double eta,
                                int max_word_len = 4);

/// sum_j p_j ||g_j||^(s+beta) iota(g_j)^(-beta)
double exponential_moment(const MatrixModel& model, double s, double beta);

/// Dominant eigen-direction of a proximal matrix, or nullopt when no simple
/// real dominant eigenvalue exists at the given relative gap.
std::optional<Vec> dominant_direction(const Mat& g, double* gap = nullptr);

/// Product g_{w_k} ... g_{w_1} for the word (w_1, ..., w_k).
Mat word_product(const MatrixModel& model, const std::vector<std::size_t>& word);

}  // namespace prm
