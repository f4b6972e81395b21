#pragma once

#include <cmath>
#include <cstdint>

namespace bbs {

// Counter-based generator (SplitMix64 output function over a Weyl
// sequence). State is a single counter, so streams are cheap to derive
// and bit-reproducible across platforms; all samplers in this project
// draw exclusively from this engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Derives an independent stream for replica `index` from a base seed.
  static Rng replica(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1))));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform on {0,...,n-1} (n > 0); rejection-free modulo using 64-bit
  // multiply-shift.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller (deterministic, no cached spare so a
  // stream consumes a fixed number of draws per call).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  // Samples from a finite distribution given cumulative weights
  // cdf[0..n-1] with cdf[n-1] == 1 (up to rounding).
  int categorical(const double* cdf, int n) {
    const double u = uniform();
    for (int i = 0; i + 1 < n; ++i)
      if (u < cdf[i]) return i;
    return n - 1;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

// Derives a named sub-seed, for giving each experiment component its own
// stream from one master seed.
inline std::uint64_t subseed(std::uint64_t seed, std::uint64_t tag) {
  Rng r(seed ^ (tag * 0xda942042e4dd58b5ULL));
  return r.next_u64();
}

}  // namespace bbs
