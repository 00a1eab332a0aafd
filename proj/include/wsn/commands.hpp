#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "wsn/dps.hpp"

namespace wsn {

enum class SubstituteSource { none, weather_forecast };

const char* substitute_source_name(SubstituteSource s);
SubstituteSource substitute_source_from_name(const std::string& name);

// Instruction from the dashboard toward a sensor node. At least one of the
// optional fields must be set.
struct ReconfigCommand {
  std::string target_sensor_id;
  std::optional<std::int64_t> set_interval_seconds;
  std::optional<dps::ModelUpdateMsg> model_update;
  std::optional<double> threshold_epsilon;
  std::optional<SubstituteSource> substitute_source;

  bool has_any_field() const {
    return set_interval_seconds.has_value() || model_update.has_value() ||
           threshold_epsilon.has_value() || substitute_source.has_value();
  }
};

}  // namespace wsn
