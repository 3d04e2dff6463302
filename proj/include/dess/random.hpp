#pragma once

#include <cstdint>
#include <random>

namespace dess {

// std::mt19937_64 output is fixed by the standard, but the std distributions
// are not, so draws are mapped to ranges here to keep sequences identical
// across standard libraries.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform double in [lo, hi].
inline double uniform_real(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n). Bias is at most n / 2^64.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) { return rng() % n; }

/// Derives an independent-looking seed for stream `index` of `base`
/// (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace dess
