#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ardq {

/// Counter-based 64-bit generator.
///
/// Draw number n (1-based) of a stream with key K is
///   splitmix64_finalizer(K + n * 0x9E3779B97F4A7C15)
/// using wrapping unsigned 64-bit arithmetic. A stream is fully described by
/// (key, counter), so any implementation with 64-bit integers reproduces the
/// same sequence. Real-valued draws take the top 53 bits.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6A09E667F3BCC908ULL)) {}

  static CounterRng with_key(std::uint64_t key, std::uint64_t counter = 0) {
    CounterRng r;
    r.key_ = key;
    r.counter_ = counter;
    return r;
  }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  /// Independent child stream; does not advance this generator.
  CounterRng split(std::uint64_t stream) const {
    return with_key(mix(key_ ^ mix(stream * kGamma + 0xBB67AE8584CAA73BULL)));
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on the closed interval [lo, hi]; rejection sampling, no modulo bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return lo + static_cast<std::int64_t>(next_u64());
    const std::uint64_t limit = (~std::uint64_t{0} / span) * span;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return lo + static_cast<std::int64_t>(v % span);
  }

  /// Standard normal via Box-Muller (cosine branch only, two draws per call).
  double normal() {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Knuth's multiplication method; fine for the small rates used here.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double threshold = std::exp(-lambda);
    int k = 0;
    double p = uniform();
    while (p > threshold) {
      ++k;
      p *= uniform();
    }
    return k;
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace ardq
