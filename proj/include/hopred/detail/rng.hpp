#pragma once

#include <cmath>
#include <cstdint>

namespace hopred::detail {

/// splitmix64: counter-based 64-bit generator. Each trajectory gets its own
/// stream derived from (seed, stream index), so results are reproducible and
/// independent of how trajectories are scheduled across threads.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t s) : state(s) {}

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    g.next();  // decouple nearby (seed, index) pairs
    return g;
  }

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard exponential via inversion.
  double exponential() { return -std::log1p(-uniform01()); }

  /// Uniform in [lo, hi) of the log, i.e. log-uniform draw.
  double log_uniform(double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * uniform01());
  }
};

}  // namespace hopred::detail
