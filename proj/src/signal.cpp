#include "wsn/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wsn/csv.hpp"
#include "wsn/energy.hpp"
#include "wsn/error.hpp"
#include "wsn/time_util.hpp"

namespace wsn::sim {

double event_cost(const EnergyModel& model, EnergyEvent event) {
  switch (event) {
    case EnergyEvent::sample: return model.cost_sample_joules;
    case EnergyEvent::tx: return model.cost_tx_joules;
    case EnergyEvent::rx: return model.cost_rx_joules;
  }
  return 0.0;
}

EnergyModel apply_energy(const EnergyModel& model, EnergyEvent event) {
  EnergyModel out = model;
  out.battery_joules = std::max(0.0, model.battery_joules - event_cost(model, event));
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

double seeded_noise(std::uint64_t seed, std::int64_t t) {
  const std::uint64_t base = splitmix64(seed ^ 0x5851f42d4c957f2dull);
  const std::uint64_t a = splitmix64(base ^ (static_cast<std::uint64_t>(t) * 2 + 1));
  const std::uint64_t b = splitmix64(base ^ (static_cast<std::uint64_t>(t) * 2 + 2));
  double u1 = to_unit(a);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = to_unit(b);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::pair<std::int64_t, double>> load_trace(
    const std::filesystem::path& path) {
  const CsvFile csv = read_csv(path, {"timestamp", "value"});
  std::vector<std::pair<std::int64_t, double>> rows;
  rows.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    std::int64_t ts;
    double value;
    try {
      ts = parse_iso8601_utc(csv.rows[i][0]);
      value = std::stod(csv.rows[i][1]);
    } catch (const std::exception& e) {
      throw ValidationError(path.string() + " row " + std::to_string(i + 2) +
                            ": " + e.what());
    }
    if (!std::isfinite(value)) {
      throw ValidationError(path.string() + " row " + std::to_string(i + 2) +
                            ": non-finite value");
    }
    if (!rows.empty() && ts <= rows.back().first) {
      throw ValidationError(path.string() + " row " + std::to_string(i + 2) +
                            ": timestamps must be strictly increasing");
    }
    rows.emplace_back(ts, value);
  }
  if (rows.empty()) {
    throw ValidationError(path.string() + ": trace has no rows");
  }
  return rows;
}

SignalSampler::SignalSampler(SignalSource source, std::int64_t start_wallclock)
    : source_(std::move(source)), start_wallclock_(start_wallclock) {
  if (source_.kind == SignalKind::trace_file) {
    trace_ = load_trace(source_.trace_path);
  }
  if (source_.noise_std < 0.0) {
    throw ValidationError("signal: noise_std must be >= 0");
  }
}

double SignalSampler::sample(std::int64_t sim_time_seconds) const {
  if (source_.kind == SignalKind::synthetic) {
    double v = source_.base_level;
    if (source_.daily_amplitude != 0.0) {
      v += source_.daily_amplitude *
           std::sin(2.0 * std::numbers::pi *
                    static_cast<double>(sim_time_seconds) / 86400.0);
    }
    if (source_.noise_std > 0.0) {
      v += source_.noise_std * seeded_noise(source_.seed, sim_time_seconds);
    }
    return v;
  }
  const std::int64_t at = start_wallclock_ + sim_time_seconds;
  auto upper = std::upper_bound(
      trace_.begin(), trace_.end(), at,
      [](std::int64_t t, const auto& row) { return t < row.first; });
  if (upper == trace_.begin()) {
    throw ValidationError("trace lookup before the first sample: " +
                          format_iso8601_utc(at));
  }
  return std::prev(upper)->second;
}

}  // namespace wsn::sim
