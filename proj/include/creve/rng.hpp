#pragma once

#include <cmath>
#include <cstdint>

namespace creve {

// Seeded 64-bit PRNG (splitmix64). All randomness in the library goes
// through this generator so a given seed reproduces a run exactly.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Unbiased integer in [0, n); n > 0. Rejection sampling on the smallest
  // covering power of two.
  std::uint32_t below(std::uint32_t n) {
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    for (;;) {
      const std::uint64_t v = next() & mask;
      if (v < n) return static_cast<std::uint32_t>(v);
    }
  }

  // Standard normal deviate (Box-Muller).
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793 * u2);
  }

  // Generator for an independent stream identified by (seed, a, b), e.g.
  // one stream per radar scan. Streams can be created in any order.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t a,
                           std::uint64_t b = 0) {
    SplitMix64 g(seed);
    SplitMix64 h(g.next() ^ (a * 0x9e3779b97f4a7c15ull));
    return SplitMix64(h.next() ^ (b * 0xbf58476d1ce4e5b9ull));
  }

 private:
  std::uint64_t state_;
};

}  // namespace creve
