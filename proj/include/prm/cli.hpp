#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace prm {

inline const std::vector<std::string> kCommands{"validate", "spectral", "rate",     "theory",
                                                "estimate", "verify",   "diagnose", "enumerate"};

/// Resolved parameters of one run. `values` holds every known key, with
/// defaults filled in; keys a command does not use are carried along.
struct RunConfig {
  std::string command;
  nlohmann::json values = nlohmann::json::object();
  std::filesystem::path base_dir = ".";  ///< relative model paths resolve here

  bool has(const std::string& key) const { return !values.at(key).is_null(); }
  template <class T>
  T get(const std::string& key) const {
    return values.at(key).get<T>();
  }
};

/// Config with every key at its default (null where there is none).
RunConfig default_config();

/// Strict parse of a JSON config file: unknown keys and ill-typed values are
/// errors.
RunConfig load_config(const std::filesystem::path& path);

/// Overlays a JSON object of settings onto `config` with the same checks.
void apply_settings(RunConfig& config, const nlohmann::json& settings);

/// Range checks and per-command completeness; throws ConfigError.
void check_config(const RunConfig& config);

/// 16 hex digits identifying the resolved config.
std::string config_hash(const RunConfig& config);

/// Entry point of the prmld tool. Returns 0 on pass, 2 when a statistical
/// test fails, 1 on error.
int run_cli(int argc, char** argv);

}  // namespace prm
