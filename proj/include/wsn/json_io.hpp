#pragma once

#include <json.hpp>

#include "wsn/commands.hpp"
#include "wsn/measurement.hpp"
#include "wsn/rules.hpp"

namespace wsn {

// Insertion-ordered JSON keeps wire payloads in their documented canonical
// field order and makes serialized output reproducible.
using Json = nlohmann::ordered_json;

Json to_json(const Measurement& m);
Measurement measurement_from_json(const Json& j);

Json to_json(const arima::ArimaModel& m);
arima::ArimaModel arima_model_from_json(const Json& j);

// Canonical form: order, ar_coeffs, ma_coeffs, intercept, noise_variance,
// origin_tick.
Json to_json(const dps::ModelUpdateMsg& msg);
dps::ModelUpdateMsg model_update_from_json(const Json& j);

Json to_json(const ReconfigCommand& cmd);
ReconfigCommand reconfig_from_json(const Json& j);

// Configuration fragments shared by the scenario files and the sensor
// registration endpoint. Schedule segments use "HH:MM"(:SS) bounds.
Json to_json(const rules::ScheduleRule& rule);
rules::ScheduleRule schedule_rule_from_json(const Json& j);

Json to_json(const dps::DpsConfig& cfg);
dps::DpsConfig dps_config_from_json(const Json& j);

Json to_json(const rules::RelevancePolicy& p);
rules::RelevancePolicy relevance_policy_from_json(const Json& j);

// Shortest representation that parses back to the identical double.
std::string format_double(double v);

// Parses `text` as JSON; wraps parse failures in ValidationError.
Json parse_json(const std::string& text, const std::string& context);

}  // namespace wsn
