#pragma once

// Counter-based SplitMix64 stream. Draw k (1-based) of a stream with seed s
// is mix(s + k * 0x9E3779B97F4A7C15), where mix is the SplitMix64 finalizer.
// Uniforms take the top 53 bits; normals use Box-Muller with one pair of
// uniforms per draw (the sine branch is discarded), so every draw consumes a
// fixed number of counter steps except Poisson variates. Test vectors are in
// docs/rng.md.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fdinet::synth {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() { return mix(seed_ + (++counter_) * kGolden); }

  /// Independent stream for a named stage; derived from the seed only.
  CounterRng substream(std::uint64_t tag) const { return CounterRng(mix(seed_ ^ mix(tag + kGolden))); }

  /// [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// (0, 1)
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Knuth's product method below mean 30, Hormann's PTRS above.
  double poisson(double mean) {
    if (!(mean > 0.0)) return 0.0;
    if (mean < 30.0) {
      const double limit = std::exp(-mean);
      double prod = uniform_open();
      double k = 0.0;
      while (prod > limit) {
        prod *= uniform_open();
        k += 1.0;
      }
      return k;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
      const double u = uniform() - 0.5;
      const double v = uniform_open();
      const double us = 0.5 - std::abs(u);
      const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return k;
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <= -mean + k * loglam - std::lgamma(k + 1.0)) {
        return k;
      }
    }
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace fdinet::synth
