#include "wsn/series.hpp"

#include <cmath>
#include <string>

#include "wsn/error.hpp"

namespace wsn {

Series difference(const Series& series, int d) {
  if (d < 0) throw ValidationError("difference: d must be >= 0");
  if (series.values.size() <= static_cast<std::size_t>(d)) {
    throw LengthError("difference: series of length " +
                      std::to_string(series.values.size()) +
                      " too short for d=" + std::to_string(d));
  }
  std::vector<double> cur = series.values;
  for (int k = 0; k < d; ++k) {
    std::vector<double> next(cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      next[i] = cur[i + 1] - cur[i];
    }
    cur = std::move(next);
  }
  return Series{std::move(cur), series.start_tick + d, series.tick_seconds};
}

Series integrate(const Series& diffed, std::span<const double> initial_values,
                 int d) {
  if (static_cast<int>(initial_values.size()) != d) {
    throw ArityError("integrate: expected " + std::to_string(d) +
                     " initial values, got " +
                     std::to_string(initial_values.size()));
  }
  // Heads of each difference level, computed from the initial values: the
  // first element of the j-th difference of the original series.
  std::vector<std::vector<double>> init_levels;
  std::vector<double> lvl(initial_values.begin(), initial_values.end());
  for (int j = 0; j < d; ++j) {
    init_levels.push_back(lvl);
    std::vector<double> next(lvl.size() > 0 ? lvl.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < lvl.size(); ++i) {
      next[i] = lvl[i + 1] - lvl[i];
    }
    lvl = std::move(next);
  }

  std::vector<double> cur = diffed.values;
  for (int j = d - 1; j >= 0; --j) {
    std::vector<double> rebuilt(cur.size() + 1);
    rebuilt[0] = init_levels[static_cast<std::size_t>(j)][0];
    for (std::size_t i = 0; i < cur.size(); ++i) {
      rebuilt[i + 1] = rebuilt[i] + cur[i];
    }
    cur = std::move(rebuilt);
  }
  return Series{std::move(cur), diffed.start_tick - d, diffed.tick_seconds};
}

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace wsn
