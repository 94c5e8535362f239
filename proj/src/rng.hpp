#pragma once

#include <cmath>
#include <cstdint>

// Portable deterministic random number generation. Weight initialization must
// reproduce bit-for-bit across builds and platforms, so we pin the exact
// algorithm here instead of using <random> (whose distributions are
// implementation-defined):
//
//   state' = state + 0x9E3779B97F4A7C15
//   z = state'; z = (z ^ z >> 30) * 0xBF58476D1CE4E5B9
//   z = (z ^ z >> 27) * 0x94D049BB133111EB
//   output = z ^ z >> 31                       (splitmix64)
//
// Uniform doubles take the top 53 bits: u = (output >> 11) * 2^-53, in [0, 1).
// Gaussian draws use the Box-Muller transform on consecutive uniforms
// (u1, u2), with u1 mapped to (0, 1]:
//
//   r  = sqrt(-2 ln(1 - u1))
//   z0 = r cos(2 pi u2),  z1 = r sin(2 pi u2)
//
// Both outputs of a pair are consumed, z0 first.

namespace simx {

class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

class GaussianStream {
 public:
  explicit GaussianStream(uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - rng_.next_unit();  // (0, 1]
    double u2 = rng_.next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  float next_scaled(double mean, double stddev) {
    return static_cast<float>(mean + stddev * next());
  }

 private:
  SplitMix64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace simx
