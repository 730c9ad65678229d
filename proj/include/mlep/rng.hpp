#pragma once

#include <cstdint>
#include <random>

namespace mlep {

/// 64-bit Mersenne Twister. Seeded directly with the 64-bit seed, so a
/// (seed, call sequence) pair reproduces the same stream on any platform.
using Rng = std::mt19937_64;

/// Uniform draw on the open interval (0, 1) built from the top 53 bits.
inline double uniform_open(Rng& rng) {
  for (;;) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

/// Standard normal variate by the Marsaglia polar method. Implemented here
/// rather than through std::normal_distribution, whose algorithm is left
/// to the standard library vendor.
double standard_normal(Rng& rng);

/// SplitMix64 finalizer; derives well-separated child seeds from a parent.
constexpr std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mlep
