#include <cstdio>
#include <cstdlib>
#include <string>

#include "prm/acceptance.hpp"
#include "prm/errors.hpp"

// Runs every acceptance criterion and prints one verdict line each. Criterion
// ids given on the command line restrict the run.
int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  prm::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) options.only.push_back(std::atoi(argv[i]));
  int failed = 0;
  try {
    const auto results = prm::run_acceptance(options, [&](const prm::CriterionResult& r) {
      std::printf("%s\n", r.line().c_str());
      if (!r.pass) ++failed;
    });
    std::printf("%zu criteria, %d passed, %d failed\n", results.size(), static_cast<int>(results.size()) - failed,
                failed);
  } catch (const prm::Error& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 1;
  }
  return failed == 0 ? 0 : 1;
}
