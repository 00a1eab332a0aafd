#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace wsn {

// Seeded Gaussian sampler built on mt19937_64 with an explicit Box-Muller
// transform. std::normal_distribution is implementation-defined, so replayed
// scenarios would not be reproducible across standard libraries with it.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

  double uniform() {
    // 53-bit mantissa uniform in [0, 1).
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double next(double mean = 0.0, double stddev = 1.0) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return mean + stddev * r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wsn
