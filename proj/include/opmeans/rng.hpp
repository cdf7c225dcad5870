#pragma once

#include <cmath>
#include <cstdint>

namespace opmeans {

/// Small deterministic PRNG (splitmix64). Used everywhere randomness is
/// needed so that seeded runs are reproducible byte-for-byte regardless of
/// platform or standard-library version.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Log-uniform in [lo, hi), lo > 0.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  /// Standard normal via Box-Muller. Draws two uniforms per call.
  double gaussian() {
    double u1 = uniform01();
    double u2 = uniform01();
    // Push u1 away from 0 so the log stays finite.
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  int uniform_int(int lo, int hi) {  // inclusive range [lo, hi]
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(next_u64() % span);
  }

  /// Derives an independent stream for sample `index` of a run seeded with
  /// `seed`. Serial and parallel execution of samples see identical streams.
  static Rng for_sample(std::uint64_t seed, std::uint64_t index) {
    Rng mixer(seed ^ (0x632be59bd9b4e019ULL * (index + 1)));
    return Rng(mixer.next_u64());
  }

private:
  std::uint64_t state_;
};

}  // namespace opmeans
