#pragma once

#include <cstdint>
#include <random>

namespace uqod {

/// Portable seeded generator: std::mt19937_64 (fully specified by the
/// standard) with locally defined uniform, bounded and Gaussian transforms,
/// so the same seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), by rejection. n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

  /// Standard normal via Box-Muller (one draw per call).
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  /// SplitMix64 finalizer over (seed, a, b); used to derive independent
  /// per-image and per-variant streams.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

 private:
  std::mt19937_64 engine_;
};

}  // namespace uqod
