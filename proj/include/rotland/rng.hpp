#pragma once

#include <cstdint>
#include <random>

namespace rotland {

namespace detail {

// SplitMix64 finalizer; used to decorrelate seeds for substreams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace detail

/// Single-owner source of randomness. Substreams derived from
/// (seed, index) are independent and reproducible regardless of the
/// order in which they are consumed, which is what makes concurrent
/// restart campaigns deterministic.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  static RandomSource substream(std::uint64_t seed, std::uint64_t index) {
    return RandomSource(detail::mix_seed(seed, index));
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  /// N(0, sigma^2) sample; sigma = 0 returns exactly 0.
  double normal(double sigma = 1.0) {
    if (sigma == 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sigma)(engine_);
  }

  /// Uniform integer in [0, bound).
  std::uint64_t integer(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rotland
