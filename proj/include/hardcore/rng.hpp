#pragma once

#include <cstdint>
#include <limits>

namespace hardcore {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x = (*this)();
    while (x >= limit) x = (*this)();
    return x % n;
  }

 private:
  std::uint64_t state_;
};

/// Independent stream for (seed, index): the same pair always yields the
/// same sequence, whatever order streams are created in.
constexpr SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix64(seed ^ 0x6A09E667F3BCC909ULL) ^ mix64(index + 0x3C6EF372FE94F82BULL));
}

/// Derived seed for an independent sub-problem (graph component, trial, ...).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(mix64(seed) + 0xBB67AE8584CAA73BULL * (tag + 1));
}

}  // namespace hardcore
