#pragma once

// Portable random primitives. The standard <random> distributions are
// implementation-defined, so every draw that feeds a persisted record goes
// through these helpers on top of std::mt19937_64 (whose output is fixed by
// the standard).

#include <cmath>
#include <cstdint>
#include <random>

namespace likenet {

/// One SplitMix64 step; a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based child seed: (master, index, stream) -> independent seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(master) ^ index) + stream * 0x632be59bd9b4e019ULL);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform integer on [0, bound), bound > 0, by rejection.
inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % bound;
}

/// Exponential with rate lambda (mean 1/lambda), by inversion.
inline double exponential(std::mt19937_64& gen, double lambda) {
  return -std::log1p(-uniform01(gen)) / lambda;
}

}  // namespace likenet
