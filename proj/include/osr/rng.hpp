#pragma once

// Deterministic, platform-independent randomness. The standard library's
// distributions (and std::shuffle) are implementation-defined, so everything
// that must reproduce byte-identically across platforms goes through this
// header instead: a SplitMix64 engine (Steele, Lea & Flood 2014), unbiased
// bounded draws by rejection, uniform doubles from the top 53 bits, and
// Gaussians via the Marsaglia polar method.
//
// Substreams: `substream(seed, tag, index)` derives an independent engine by
// hashing, so per-item generation (one stream per sample / per search draw)
// is independent of evaluation order and thread count.

#include <cmath>
#include <cstdint>

namespace osr {

namespace detail {
// Finalizer of SplitMix64; a strong 64-bit bijective mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return detail::mix64(state_);
  }

  // Unbiased integer in [0, n); n >= 1. Classic rejection construction:
  // (2^64 - n) % n values at the bottom are discarded.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via the polar method (no trig; the spare deviate of each
  // accepted pair is cached).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Independent engine for (seed, tag, index). Tags separate purposes (class
// directions vs. samples vs. subset draws); the index is the item counter.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  std::uint64_t s = detail::mix64(seed + 0x9E3779B97F4A7C15ull);
  s = detail::mix64(s ^ (tag + 0xBF58476D1CE4E5B9ull));
  s = detail::mix64(s ^ (index + 0x94D049BB133111EBull));
  return SplitMix64(s);
}

}  // namespace osr
