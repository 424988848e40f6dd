#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace prm {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  nlohmann::json data;  ///< measured numbers behind the verdict

  /// "[PASS] 3 cross-oracle kappa: ..." on one line.
  std::string line() const;
  nlohmann::json to_json() const;
};

struct AcceptanceOptions {
  std::vector<int> only;  ///< empty runs all criteria
  std::uint64_t seed = 20240611;
  unsigned workers = 0;
};

inline constexpr int kCriterionCount = 16;

/// Runs the acceptance suite on the fib2 benchmark; `on_result` sees each
/// verdict as soon as it is known.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace prm
