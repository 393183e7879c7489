#pragma once

#include <cstdint>
#include <cstring>
#include <span>

namespace spheremaps {

/// Portable seeded generator; all sampled results in the library go through
/// it so runs are bit-reproducible for a fixed seed.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t bounded(std::uint64_t n) { return next() % n; }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
};

/// FNV-1a over the bit patterns, mixed with the seed; used to derive per-call
/// substreams from evaluation inputs.
inline std::uint64_t hash_coords(std::uint64_t seed, std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    h = (h ^ bits) * 0x100000001b3ull;
  }
  return h;
}

}  // namespace spheremaps
