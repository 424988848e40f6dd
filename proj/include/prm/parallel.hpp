#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace prm {

/// Monte Carlo budget shared by every estimator.
struct Sampling {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  /// 0 means std::thread::hardware_concurrency().
  unsigned workers = 0;
};

unsigned resolve_workers(unsigned requested);

/// Calls body(i) for i in [0, count) on up to `workers` threads. Each index
/// runs exactly once; results must be written to index-owned slots.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

/// Pairwise (tree) sum; the association order depends only on the length.
double pairwise_sum(std::span<const double> x);

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased sample variance
  double std_error = 0.0; ///< sqrt(variance / count)
  std::size_t count = 0;
};

SampleStats summarize(std::span<const double> x);

/// Sample covariance of two equally long samples.
double covariance(std::span<const double> x, std::span<const double> y);

}  // namespace prm
