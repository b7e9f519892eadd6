#pragma once

#include <cstdint>
#include <limits>

namespace mixbench {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Key of the independent stream `index` under `master`. Replicates, pairs
/// and sub-experiments all derive their randomness through this function so
/// results do not depend on scheduling.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// Counter-based generator: draw i is mix64(key + i * golden_gamma).
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(mix64(key)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform on (0, 1], 53 bits.
  double uniform() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal (Box-Muller, second variate cached).
  double normal() noexcept;

  /// Uniform sign in {-1, +1}.
  int sign() noexcept { return ((*this)() >> 63) ? 1 : -1; }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace mixbench
