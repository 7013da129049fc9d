#pragma once

#include <cstdint>
#include <random>

namespace covsim {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic uniform draw stream; `stream` separates per-agent substreams
/// derived from one user-facing seed. Draws avoid std::uniform_real_distribution
/// so sequences are identical across standard libraries.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t stream)
      : eng_(detail::splitmix64(seed ^ detail::splitmix64(stream + 1))) {}

  /// Uniform in [0, 1) with 53 random bits.
  double next() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double next_in(double lo, double hi) { return lo + next() * (hi - lo); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace covsim
