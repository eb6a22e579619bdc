#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hypercone {

/// SplitMix64 in counter mode: the k-th output is mix(seed + k * gamma).
/// The stream is fully determined by the seed on every platform, which the
/// std:: engines plus std:: distributions do not guarantee.
class SplitMix64 {
 public:
  static constexpr const char* kName = "splitmix64-counter/v1";

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Inverse-CDF sampling from a probability vector.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& p);
  std::size_t operator()(SplitMix64& rng) const;

 private:
  std::vector<double> cdf_;
};

}  // namespace hypercone
