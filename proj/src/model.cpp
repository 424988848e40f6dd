#include "prm/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "prm/errors.hpp"
#include "prm/geometry.hpp"

namespace prm {

MatrixFunctionals matrix_functionals(const Mat& g) {
  if (g.rows() != g.cols() || g.rows() == 0) throw InvalidModel("matrix must be square");
  Eigen::JacobiSVD<Mat> svd(g);
  const auto& sv = svd.singularValues();
  const double norm = sv(0);
  const double iota = sv(sv.size() - 1);
  if (!(iota > 0.0) || iota <= 1e-300 * std::max(norm, 1.0)) {
    throw InvalidModel("matrix is singular");
  }
  return {norm, iota, std::max(norm, 1.0 / iota)};
}

namespace {

std::string default_name(std::size_t j, std::size_t m) {
  if (m <= 26) return std::string(1, static_cast<char>('A' + j));
  return "g" + std::to_string(j + 1);
}

}  // namespace

MatrixModel::MatrixModel(std::vector<Mat> generators, std::vector<double> weights,
                         ModelOptions options, std::vector<std::string> names)
    : generators_(std::move(generators)), weights_(std::move(weights)), options_(options) {
  const std::size_t m = generators_.size();
  if (m == 0) throw InvalidModel("model needs at least one generator");
  if (m < 2 && !options_.allow_single_generator) {
    throw InvalidModel("model needs m >= 2 generators (set allow_single_generator to override)");
  }
  if (weights_.size() != m) throw InvalidModel("generator and weight counts differ");
  dim_ = static_cast<int>(generators_.front().rows());
  if (dim_ < 2) throw InvalidModel("dimension must be at least 2");

  double total = 0.0;
  for (double p : weights_) {
    if (!(p > 0.0)) throw InvalidModel("weights must be strictly positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidModel("weights must sum to 1 (got " + std::to_string(total) + ")");
  }

  for (std::size_t j = 0; j < m; ++j) {
    const Mat& g = generators_[j];
    if (g.rows() != dim_ || g.cols() != dim_) throw InvalidModel("generators differ in shape");
    if (!g.allFinite()) throw InvalidModel("generator has non-finite entries");
    const double norm = g.operatorNorm();
    if (std::abs(g.determinant()) <= 1e-12 * std::pow(norm, dim_)) {
      throw InvalidModel("generator " + std::to_string(j + 1) + " is not invertible");
    }
    functionals_.push_back(matrix_functionals(g));
  }

  cumulative_.resize(m);
  std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
  cumulative_.back() = 1.0;

  if (dim_ == 2) {
    for (const Mat& g : generators_) {
      generators2_.push_back(g);
      transposes2_.push_back(g.transpose());
    }
  }

  if (names.empty()) {
    for (std::size_t j = 0; j < m; ++j) names_.push_back(default_name(j, m));
  } else {
    if (names.size() != m) throw InvalidModel("name count differs from generator count");
    names_ = std::move(names);
  }
}

std::size_t MatrixModel::draw(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), size() - 1);
}

std::string MatrixModel::word_name(const std::vector<std::size_t>& word) const {
  std::string out;
  for (auto it = word.rbegin(); it != word.rend(); ++it) out += names_[*it];
  return out;
}

nlohmann::json MatrixModel::to_json() const {
  nlohmann::json gens = nlohmann::json::array();
  for (const Mat& g : generators_) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < g.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int k = 0; k < g.cols(); ++k) row.push_back(g(i, k));
      rows.push_back(row);
    }
    gens.push_back(rows);
  }
  nlohmann::json doc{{"dimension", dim_}, {"generators", gens}, {"weights", weights_},
                     {"names", names_}};
  if (options_.allow_single_generator) doc["allow_single_generator"] = true;
  return doc;
}

MatrixModel MatrixModel::from_json(const nlohmann::json& doc) {
  static const std::set<std::string> known{"dimension", "generators", "weights", "names",
                                           "allow_single_generator"};
  if (!doc.is_object()) throw ConfigError("model file must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown model key '" + key + "'");
  }
  for (const char* key : {"dimension", "generators", "weights"}) {
    if (!doc.contains(key)) throw ConfigError(std::string("model is missing '") + key + "'");
  }
  const int d = doc.at("dimension").get<int>();
  std::vector<Mat> gens;
  for (const auto& rows : doc.at("generators")) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != d) {
      throw ConfigError("generator must have 'dimension' rows");
    }
    Mat g(d, d);
    for (int i = 0; i < d; ++i) {
      if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != d) {
        throw ConfigError("generator row must have 'dimension' entries");
      }
      for (int k = 0; k < d; ++k) g(i, k) = rows[i][k].get<double>();
    }
    gens.push_back(std::move(g));
  }
  ModelOptions options;
  if (doc.contains("allow_single_generator")) {
    options.allow_single_generator = doc.at("allow_single_generator").get<bool>();
  }
  std::vector<std::string> names;
  if (doc.contains("names")) names = doc.at("names").get<std::vector<std::string>>();
  return MatrixModel(std::move(gens), doc.at("weights").get<std::vector<double>>(), options,
                     std::move(names));
}

MatrixModel MatrixModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed model file " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

double exponential_moment(const MatrixModel& model, double s, double beta) {
  double total = 0.0;
  for (std::size_t j = 0; j < model.size(); ++j) {
    const auto& f = model.functionals(j);
    total += model.weight(j) *
             std::exp((s + beta) * std::log(f.norm) - beta * std::log(f.iota));
  }
  return total;
}

std::optional<Vec> dominant_direction(const Mat& g, double* gap) {
  Eigen::EigenSolver<Mat> es(g, true);
  if (es.info() != Eigen::Success) return std::nullopt;
  const auto& ev = es.eigenvalues();
  const int d = static_cast<int>(ev.size());
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(ev(a)) > std::abs(ev(b)); });
  const double top = std::abs(ev(order[0]));
  const double second = d > 1 ? std::abs(ev(order[1])) : 0.0;
  const double rel_gap = (top - second) / top;
  if (gap) *gap = rel_gap;
  if (!(rel_gap > kProximalGap)) return std::nullopt;
  Vec v = es.eigenvectors().col(order[0]).real();
  if (v.norm() == 0.0) return std::nullopt;
  return v.normalized();
}

Mat word_product(const MatrixModel& model, const std::vector<std::size_t>& word) {
  Mat out = Mat::Identity(model.dim(), model.dim());
  for (std::size_t j : word) out = model.generator(j) * out;
  return out;
}

ValidationReport validate_model(const MatrixModel& model, double s, double beta, double eta,
                                int max_word_len) {
  if (max_word_len < 1) throw DomainError("max_word_len must be >= 1");
  ValidationReport report;
  report.moment_values[{s, beta}] = exponential_moment(model, s, beta);
  report.eta = eta;
  for (std::size_t j = 0; j < model.size(); ++j) {
    report.n_g_moment += model.weight(j) * std::pow(model.functionals(j).n_g, eta);
  }

  std::vector<ProjPoint> directions;
  const std::size_t m = model.size();
  std::vector<std::size_t> word;
  for (int len = 1; len <= max_word_len; ++len) {
    word.assign(len, 0);
    while (true) {
      ++report.words_scanned;
      double gap = 0.0;
      if (auto dir = dominant_direction(word_product(model, word), &gap)) {
        if (!report.proximal_witness) {
          report.proximal_witness = model.word_name(word);
          report.witness_word = word;
          report.witness_gap = gap;
        }
        ProjPoint p(*dir);
        const bool fresh = std::none_of(directions.begin(), directions.end(), [&](const auto& q) {
          return angular_distance(p, q) <= kDistinctDirection;
        });
        if (fresh) directions.push_back(p);
      }
      // odometer increment
      int pos = 0;
      while (pos < len && ++word[pos] == m) word[pos++] = 0;
      if (pos == len) break;
    }
  }
  report.distinct_directions = directions.size();
  report.irreducibility_pass =
      directions.size() >= static_cast<std::size_t>(2 * model.dim() + 1);
  return report;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json moments = nlohmann::json::array();
  for (const auto& [key, value] : moment_values) {
    moments.push_back({{"s", key.first}, {"beta", key.second}, {"value", value}});
  }
  nlohmann::json doc{{"proximal_witness", nullptr},
                     {"irreducibility_pass", irreducibility_pass},
                     {"distinct_directions", distinct_directions},
                     {"words_scanned", words_scanned},
                     {"moment_values", moments},
                     {"eta", eta},
                     {"n_g_moment", n_g_moment}};
  if (proximal_witness) {
    doc["proximal_witness"] = *proximal_witness;
    doc["witness_gap"] = witness_gap;
  }
  return doc;
}

}  // namespace prm
