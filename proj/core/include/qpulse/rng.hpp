#pragma once

#include <cstdint>
#include <random>

namespace qpulse {

/// Deterministic pseudo-random stream. The engine is std::mt19937_64 (fully
/// specified by the standard) and the uniform mapping is done by hand, so a
/// given (seed, stream) pair yields the same draws everywhere. Independent
/// stream indices give decorrelated streams for parallel runs.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix(seed)) {}

  static RandomStream derived(std::uint64_t seed, std::uint64_t stream) {
    return RandomStream(mix(seed) ^ mix(0x9e3779b97f4a7c15ull * (stream + 1)));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace qpulse
