#pragma once

// Shared fixtures for the test suites: seeded series generators used as
// independent oracles for the fitting and forecasting code.

#include <cstdint>
#include <vector>

#include "wsn/rng.hpp"
#include "wsn/series.hpp"

namespace testgen {

// x_t = sum_i phi_i x_{t-i} + e_t + sum_j theta_j e_{t-j}, burn-in dropped.
inline wsn::Series arma(std::uint64_t seed, std::size_t n,
                        const std::vector<double>& phi,
                        const std::vector<double>& theta, double sigma,
                        std::size_t burn_in = 200) {
  wsn::GaussianSampler rng(seed);
  const std::size_t total = n + burn_in;
  std::vector<double> x(total, 0.0);
  std::vector<double> e(total, 0.0);
  for (std::size_t t = 0; t < total; ++t) {
    e[t] = rng.next(0.0, sigma);
    double v = e[t];
    for (std::size_t i = 0; i < phi.size(); ++i) {
      if (t > i) v += phi[i] * x[t - i - 1];
    }
    for (std::size_t j = 0; j < theta.size(); ++j) {
      if (t > j) v += theta[j] * e[t - j - 1];
    }
    x[t] = v;
  }
  wsn::Series s;
  s.values.assign(x.begin() + static_cast<std::ptrdiff_t>(burn_in), x.end());
  return s;
}

// Uniform values in [lo, hi), quantized to `step` so that repeated
// differencing and re-integration stays exact in double arithmetic (raw
// sensor readings are grid values too).
inline wsn::Series quantized_uniform(std::uint64_t seed, std::size_t n,
                                     double lo, double hi,
                                     double step = 1.0 / 1048576.0) {
  wsn::GaussianSampler rng(seed);
  wsn::Series s;
  s.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double raw = lo + (hi - lo) * rng.uniform();
    const double q = step * static_cast<double>(static_cast<long long>(raw / step));
    s.values.push_back(q);
  }
  return s;
}

}  // namespace testgen
