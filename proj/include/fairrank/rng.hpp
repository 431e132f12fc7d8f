#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <utility>
#include <vector>

namespace fairrank {

// SplitMix64 (Steele, Lea & Flood, 2014). This is the repo-wide generator:
// the full state transition is three lines, so seeded splits and noise
// scenarios reproduce in any language that has 64-bit integers. Draw order
// is part of the output contract and documented in the README.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) using the top 53 bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Plain modulo: the bias is below n / 2^64 and
  // the draw sequence stays trivially portable.
  std::uint64_t bounded(std::uint64_t n) { return next() % n; }

  // Standard normal via Box-Muller. Two uniforms per variate, the sine
  // branch is discarded so one call consumes exactly two draws.
  double normal() {
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Fisher-Yates, walking from the last index down to 1.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(bounded(i))]);
    }
  }

 private:
  std::uint64_t state_;
};

// Deterministic sub-stream derivation: one SplitMix64 step per component.
// Used to give every (seed, direction, replicate, group) tuple an
// independent but reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = SplitMix64(base).next();
  for (std::uint64_t p : parts) {
    s = SplitMix64(s ^ (p + 0x9E3779B97F4A7C15ULL)).next();
  }
  return s;
}

// Round-half-up; the rounding rule for split sizes and flip counts.
inline std::size_t round_count(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

}  // namespace fairrank
