#pragma once

#include <cstdint>

namespace nodallab {

/// Counter-based pseudo-random stream.
///
/// The stream state is a pure function of (seed, counter), so the i-th
/// Monte-Carlo sample draws identical variates no matter how samples are
/// scheduled or batched.  Internally a splitmix64 walk seeded by a double
/// mix of the key; statistically adequate for Monte-Carlo integration.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t counter) {
    state_ = mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ counter);
    // one warm-up round decorrelates neighbouring counters
    state_ = mix(state_);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 significant bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [a, b).
  double next_in(double a, double b) { return a + (b - a) * next_double(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace nodallab
