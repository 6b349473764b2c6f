#pragma once

// Seeded randomness. std::mt19937_64 is fully specified by the standard; the
// distributions below are written out so draws are identical across standard
// library implementations (std::uniform_*_distribution is not).

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace qmcgs {

using Rng = std::mt19937_64;

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, n) by rejection; n must be > 0.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % bound);
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Index drawn with probability weights[i] / sum(weights). Weights must be
// nonnegative with a positive sum.
std::size_t categorical(Rng& rng, std::span<const double> weights);

// Derives an independent stream seed for run `index` from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace qmcgs
