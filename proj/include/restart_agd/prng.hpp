#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace restart_agd {

/// Deterministic 64-bit PRNG (splitmix64 recurrence).
///
/// All randomness in the library flows through this generator so that every
/// experiment is reproducible from a single integer seed, independent of the
/// platform's standard-library distributions. Uniforms take the top 53 bits
/// of the state scaled by 2^-53; normals come in Box-Muller pairs drawn from
/// two consecutive uniforms (the log argument is redrawn if it is zero).
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// One Box-Muller pair of independent standard normals.
  void normal_pair(double& z0, double& z1) {
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi_v<double> * u2;
    z0 = r * std::cos(theta);
    z1 = r * std::sin(theta);
  }

  /// Fills out[0..count) with uniforms, in stream order.
  void fill_uniform(double* out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) out[i] = uniform01();
  }

  /// Fills out[0..count) with standard normals consumed pairwise; for odd
  /// counts the dangling second member of the last pair is discarded.
  void fill_normal(double* out, std::size_t count) {
    for (std::size_t i = 0; i < count; i += 2) {
      double a, b;
      normal_pair(a, b);
      out[i] = a;
      if (i + 1 < count) out[i + 1] = b;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace restart_agd
