#pragma once

#include <cstdint>
#include <random>

namespace cycdr {

// Every random draw in this library goes through one fixed, named generator,
// so that any artifact (problem file, starting point, benchmark record) can
// be reproduced from its seed alone: std::mt19937_64 plus the 53-bit uniform
// transform below. The <random> distribution classes are avoided on purpose;
// their output is implementation-defined.
using Rng = std::mt19937_64;

// Uniform double in [0, 1): the top 53 bits of one 64-bit draw.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Child seed for a labeled stream. Pure in (seed, label), so derived streams
// can be reconstructed without access to the parent generator state.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) {
  return splitmix64(seed ^ splitmix64(label));
}

}  // namespace cycdr
