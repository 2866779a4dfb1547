#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace conloc::sim {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// xoshiro256** seeded through splitmix64. The standard-library engines and
// distributions are implementation-defined, which would break bit-identical
// output across toolchains.
class Rng {
 public:
  static Rng seeded(uint64_t seed) {
    Rng rng;
    for (auto& word : rng.s_) word = splitmix64(seed);
    return rng;
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal, Box-Muller without caching the second deviate so every
  // draw consumes a fixed, predictable amount of stream.
  double next_normal() {
    double u1 = next_unit();
    while (u1 == 0.0) u1 = next_unit();
    const double u2 = next_unit();
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4] = {};
};

// Independent substream seed for a named component of a run.
inline uint64_t substream_seed(uint64_t seed, std::string_view label) {
  uint64_t s = seed ^ fnv1a64(label);
  return splitmix64(s);
}

// Stateless per-(key, slot) uniform in [0, 1); lets slot-indexed processes be
// evaluated at arbitrary times without maintaining stream position.
inline double hash_unit(uint64_t key, int64_t slot) {
  uint64_t s = key ^ (static_cast<uint64_t>(slot) * 0x9e3779b97f4a7c15ULL);
  return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
}

}  // namespace conloc::sim
