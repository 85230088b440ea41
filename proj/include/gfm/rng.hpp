#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace gfm {

// SplitMix64 finalizer, used to spread seed material into substreams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded generator with fully pinned draw semantics.
///
/// The engine is mt19937_64 (sequence fixed by the standard); all
/// conversions to uniforms, integers, Bernoulli and Poisson draws are
/// implemented here so output bytes never depend on the standard
/// library's distribution internals. Substreams are derived with
/// mix64 chains: derive(seed, stage, item) gives independent streams
/// for per-stage, per-item work regardless of execution order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  static Rng derive(std::uint64_t seed, std::uint64_t stage, std::uint64_t item = 0) {
    return Rng(mix64(seed ^ mix64(stage ^ mix64(item))));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in {0, ..., n-1}, unbiased via rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    const std::uint64_t threshold = -n % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Poisson draw by CDF inversion. Intended for the small means used by
  /// graph edits; throws when exp(-mean) underflows.
  long poisson(double mean) {
    if (mean < 0) throw std::invalid_argument("poisson: mean must be nonnegative");
    if (mean == 0) return 0;
    double pmf = std::exp(-mean);
    if (pmf == 0.0) throw std::invalid_argument("poisson: mean too large for inversion");
    double u = uniform();
    double cum = pmf;
    long k = 0;
    while (u > cum) {
      ++k;
      pmf *= mean / static_cast<double>(k);
      cum += pmf;
      if (k > 100000000L) throw std::runtime_error("poisson: inversion failed to terminate");
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gfm
