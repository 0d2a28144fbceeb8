#pragma once

#include <cmath>
#include <cstdint>

namespace sbbp {

// Counter-based 64-bit generator (splitmix64). The internal counter advances
// by a fixed odd constant and each output is a bijective hash of the counter,
// so the n-th value is a pure function of (seed, n). Streams with different
// seeds are used for independent trials: trial t runs on seed base_seed + t.
//
// Gaussians come from the Box-Muller transform applied to this stream:
//   u1 = ((x >> 11) + 1) * 2^-53   in (0, 1]
//   u2 = (y >> 11) * 2^-53         in [0, 1)
//   z0 = sqrt(-2 ln u1) * cos(2 pi u2),  z1 = sqrt(-2 ln u1) * sin(2 pi u2)
// with z0 returned first and z1 cached for the next call.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; never zero, safe as a log() argument.
  double next_open_double() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); unbiased via rejection of the low residue band.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t residue = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= residue) return (x - residue) % n;
    }
  }

  // Standard normal deviate (Box-Muller, see class comment).
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    constexpr double two_pi = 6.28318530717958647692528676655900577;
    const double u1 = next_open_double();
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = two_pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  // Derives an independent child stream from this one.
  SplitMix64 split() { return SplitMix64(next_u64() ^ 0x3C6EF372FE94F82AULL); }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace sbbp
