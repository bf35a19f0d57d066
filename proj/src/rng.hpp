#ifndef ARBOR_RNG_HPP
#define ARBOR_RNG_HPP

#include <cstdint>
#include <random>

namespace arbor {

// All random draws go through these helpers instead of <random>
// distributions, whose output is implementation-defined. mt19937_64 itself
// is fully specified, so identical seeds give identical streams everywhere.

inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  std::size_t i = static_cast<std::size_t>(uniform_unit(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent deterministic stream per (seed, purpose tag).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

}  // namespace arbor

#endif
