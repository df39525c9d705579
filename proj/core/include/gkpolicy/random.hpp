#pragma once

// Seeded random streams. Every stochastic operation takes its generator
// explicitly; substreams are derived from (seed, index) so partitioned work
// reproduces the sequential result regardless of worker count.

#include <cstdint>
#include <random>
#include <span>

namespace gkp {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(splitmix64(splitmix64(seed ^ splitmix64(stream)) + index));
}

// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Index drawn proportionally to nonnegative weights. Returns the last index
// with positive weight when rounding leaves the draw past the total.
inline std::size_t sample_index(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace gkp
