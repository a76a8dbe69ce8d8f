#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gesturegen {

// Deterministic random source. The engine (mt19937_64) is fully specified by
// the standard, and the gaussian transform is our own Box-Muller, so a given
// seed produces the same stream on every platform. std::normal_distribution
// is deliberately avoided (its output is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    // Rejection sampling keeps the distribution exact.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller, one cached value.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// 64-bit mix (splitmix64 finalizer).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives an independent stream for (seed, stream, step). Training code draws
// all randomness of step k from derive_rng(seed, stream, k), which makes a
// resumed run reproduce the uninterrupted one exactly.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t step) {
  return Rng(mix64(mix64(seed ^ 0x243f6a8885a308d3ull) ^
                   mix64(stream * 0x9e3779b97f4a7c15ull + step)));
}

}  // namespace gesturegen
