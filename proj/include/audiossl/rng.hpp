#pragma once

#include <cstdint>
#include <random>

namespace audiossl {

using Rng = std::mt19937_64;

// splitmix64 mixing step; used to derive independent seeds from a base seed
// plus stream identifiers so that every component of a run has its own
// reproducible stream.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(mix64(base) ^ mix64(stream + 0x6a09e667f3bcc909ULL));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b) {
  return derive_seed(derive_seed(base, a), b);
}

inline Rng make_rng(std::uint64_t base, std::uint64_t stream = 0) {
  return Rng(derive_seed(base, stream));
}

inline double uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Uniform integer in [lo, hi] inclusive.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  if (lo >= hi) return lo;
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline double normal(Rng& rng, double mean = 0.0, double std = 1.0) {
  return std::normal_distribution<double>(mean, std)(rng);
}

}  // namespace audiossl
