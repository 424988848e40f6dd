#pragma once

#include <array>
#include <cstdint>

namespace prm {

/// SplitMix64 finalizer; used to derive independent keys from (seed, index).
std::uint64_t mix64(std::uint64_t z);

/// Sub-seed for stream `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Philox4x32-10 block function (Salmon et al., Random123).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block counter, Key key);
};

/// Random stream for one Monte Carlo chain. The key is derived from
/// (seed, chain) and the counter walks forward, so any chain can be
/// regenerated without replaying the others.
class ChainRng {
 public:
  ChainRng(std::uint64_t seed, std::uint64_t chain);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Standard normal by Box-Muller.
  double normal();

 private:
  Philox4x32::Key key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace prm
