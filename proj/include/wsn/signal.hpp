#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace wsn::sim {

enum class SignalKind { synthetic, trace_file };

struct SignalSource {
  SignalKind kind = SignalKind::synthetic;
  // synthetic: base + daily sine + seeded gaussian noise
  double base_level = 20.0;
  double daily_amplitude = 0.0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  // trace: CSV file with header timestamp,value
  std::filesystem::path trace_path;
};

// Standard gaussian that is a pure function of (seed, t): counter-based
// hashing rather than sequential RNG state, so a sample at time t does not
// depend on how many samples were drawn before it.
double seeded_noise(std::uint64_t seed, std::int64_t t);

class SignalSampler {
 public:
  // start_wallclock anchors simulated second 0 for trace lookups.
  SignalSampler(SignalSource source, std::int64_t start_wallclock);

  // Deterministic value at a simulated time. For traces: the nearest sample
  // at or before the instant; outside the trace span it is a range error.
  double sample(std::int64_t sim_time_seconds) const;

 private:
  SignalSource source_;
  std::int64_t start_wallclock_ = 0;
  std::vector<std::pair<std::int64_t, double>> trace_;
};

// Loads a trace CSV (header timestamp,value; ISO-8601 timestamps, strictly
// increasing). Throws ValidationError with the offending row number.
std::vector<std::pair<std::int64_t, double>> load_trace(
    const std::filesystem::path& path);

}  // namespace wsn::sim
