#pragma once

#include <cstdint>
#include <string>

namespace wsn {

// Where a stored value came from: a real sensor reading, the DPS sink's
// forecast at a suppressed tick, or an external weather forecast stored in
// place of sensor data.
enum class Provenance { sensed, dps_reconstructed, weather_forecast };

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

struct Measurement {
  std::string sensor_id;
  std::int64_t tick = 0;       // simulated seconds since scenario start
  std::int64_t wallclock = 0;  // UTC epoch seconds
  double value = 0.0;
  std::string unit;
  Provenance provenance = Provenance::sensed;
};

}  // namespace wsn
