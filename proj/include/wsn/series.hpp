#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wsn {

// A uniformly spaced run of real-valued samples. `start_tick` is the tick
// index of values[0]; `tick_seconds` is the spacing in simulated seconds.
struct Series {
  std::vector<double> values;
  std::int64_t start_tick = 0;
  std::int64_t tick_seconds = 1;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  std::int64_t end_tick() const {
    return start_tick + static_cast<std::int64_t>(values.size());
  }
};

// d-th order difference; output has d fewer values and the same spacing.
// Throws LengthError unless series.values.size() > d.
Series difference(const Series& series, int d);

// Inverse of difference: rebuilds the original series from its d-th
// difference and the first d original values. Throws ArityError when
// initial_values.size() != d.
Series integrate(const Series& diffed, std::span<const double> initial_values,
                 int d);

// True when every value is finite.
bool all_finite(std::span<const double> values);

}  // namespace wsn
