#pragma once

#include <cstdint>

namespace dqc1lab {

/// Stationary 64-bit finalizer (MurmurHash3). Used to derive independent
/// sub-stream seeds: splitmix64 walks its state by a fixed increment, so
/// seeds at small offsets of each other produce overlapping streams unless
/// they are scrambled first.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xFF51AFD7ED558CCDull;
  z ^= z >> 33;
  z *= 0xC4CEB9FE1A85EC53ull;
  z ^= z >> 33;
  return z;
}

/// Seed for the index-th independent sub-stream of a run seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 0x9E3779B97F4A7C15ull));
}

/// splitmix64: tiny, seedable, platform-independent generator used wherever
/// byte-identical reruns are part of the contract.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace dqc1lab
