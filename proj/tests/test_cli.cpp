#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "prm/cli.hpp"
#include "prm/errors.hpp"

using namespace prm;
namespace fs = std::filesystem;

namespace {

const fs::path kModels = fs::path(PRM_SOURCE_DIR) / "tools" / "models";

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "prmld-unit";
  fs::create_directories(dir);
  return dir;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "prmld");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path write_file(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = default_config();
  CHECK(c.get<int>("grid_n") == 1024);
  CHECK(c.get<double>("tol") == 1e-12);
  CHECK_FALSE(c.has("seed"));
}

TEST_CASE("strict config parsing") {
  const fs::path bad = write_file("bad.json", R"({"gamma_exponent": 2})");
  try {
    load_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("gamma_exponent") != std::string::npos);
  }
  RunConfig c = default_config();
  CHECK_THROWS_AS(apply_settings(c, {{"grid_n", "many"}}), ConfigError);
  apply_settings(c, {{"tol", 0.0}});
  c.command = "spectral";
  CHECK_THROWS_AS(check_config(c), ConfigError);
}

TEST_CASE("config hash") {
  RunConfig a = default_config();
  a.command = "theory";
  RunConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  apply_settings(b, {{"workers", 3}});
  CHECK(config_hash(a) == config_hash(b));
  apply_settings(b, {{"s", 0.5}});
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("exit codes") {
  const std::string out = scratch().string();
  const std::string fib2 = (kModels / "fib2.json").string();
  CHECK(run({"enumerate", "--model", fib2, "--n", "1", "--threshold", "0.6931471805599453", "--out", out}) == 0);
  CHECK(run({"theory", "--model", fib2, "--s", "0", "--n", "10", "--out", out}) == 1);
  CHECK(run({"estimate", "--model", fib2, "--s", "1", "--n", "10", "--samples", "100", "--out", out}) == 1);
  CHECK(run({"frobnicate"}) == 1);
  const fs::path weights = write_file(
      "weights.json", R"({"dimension": 2, "generators": [[[2,1],[1,1]], [[1,1],[1,2]]], "weights": [0.5, 0.6]})");
  CHECK(run({"validate", "--model", weights.string(), "--out", out}) == 1);
  CHECK(run({"diagnose", "--model", (kModels / "rotations.json").string(), "--diagnostic", "cartan", "--s", "0",
             "--n-list", "5,10,20", "--samples", "200", "--seed", "1", "--grid-n", "128", "--out", out}) == 2);
}
