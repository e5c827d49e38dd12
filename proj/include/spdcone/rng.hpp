// Deterministic random streams. Suites derive one stream per (seed, index)
// so iterations can run in any order or in parallel and still reproduce the
// same report. The splitmix64 core and the uniform/gaussian transforms are
// spelled out here because the standard <random> distributions are not
// specified bit-for-bit across library implementations.

#pragma once

#include <cstdint>

namespace spdcone {

class RngStream {
 public:
  explicit RngStream(uint64_t seed) : state_(seed) {
    // Warm up so that small seeds decorrelate.
    next_u64();
    next_u64();
  }

  /// Independent stream for iteration `index` of a suite seeded with `seed`.
  static RngStream for_index(uint64_t seed, uint64_t index) {
    RngStream s(mix(seed ^ mix(index + 0x9e3779b97f4a7c15ull)));
    return s;
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Standard normal via Box-Muller (pairwise, with a cached spare).
  double next_gaussian();

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spdcone
