#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qmcsdf {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based seed split: every (root, stage, counter) triple maps to an
/// independent stream seed, so stages can be re-run in isolation.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stage, std::uint64_t counter = 0) {
  return splitmix64(splitmix64(root ^ fnv1a(stage)) + counter);
}

}  // namespace qmcsdf

namespace qmcsdf {

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace qmcsdf
