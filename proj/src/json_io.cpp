#include "wsn/json_io.hpp"

#include <charconv>
#include <cmath>

#include "wsn/error.hpp"
#include "wsn/time_util.hpp"

namespace wsn {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::sensed: return "sensed";
    case Provenance::dps_reconstructed: return "dps_reconstructed";
    case Provenance::weather_forecast: return "weather_forecast";
  }
  return "sensed";
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "sensed") return Provenance::sensed;
  if (name == "dps_reconstructed") return Provenance::dps_reconstructed;
  if (name == "weather_forecast") return Provenance::weather_forecast;
  throw ValidationError("unknown provenance: " + name);
}

const char* substitute_source_name(SubstituteSource s) {
  return s == SubstituteSource::weather_forecast ? "weather_forecast" : "none";
}

SubstituteSource substitute_source_from_name(const std::string& name) {
  if (name == "none") return SubstituteSource::none;
  if (name == "weather_forecast") return SubstituteSource::weather_forecast;
  throw ValidationError("unknown substitute source: " + name);
}

namespace {

template <typename T>
T require(const Json& j, const char* key, const char* context) {
  if (!j.contains(key)) {
    throw ValidationError(std::string(context) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string(context) + ": bad field '" + key +
                          "': " + e.what());
  }
}

}  // namespace

Json to_json(const Measurement& m) {
  Json j;
  j["sensor_id"] = m.sensor_id;
  j["tick"] = m.tick;
  j["wallclock"] = format_iso8601_utc(m.wallclock);
  j["value"] = m.value;
  j["unit"] = m.unit;
  j["provenance"] = provenance_name(m.provenance);
  return j;
}

Measurement measurement_from_json(const Json& j) {
  Measurement m;
  m.sensor_id = require<std::string>(j, "sensor_id", "measurement");
  if (m.sensor_id.empty()) {
    throw ValidationError("measurement: sensor_id must not be empty");
  }
  m.tick = require<std::int64_t>(j, "tick", "measurement");
  if (j.contains("wallclock") && j.at("wallclock").is_string()) {
    m.wallclock = parse_iso8601_utc(j.at("wallclock").get<std::string>());
  } else {
    m.wallclock = require<std::int64_t>(j, "wallclock", "measurement");
  }
  m.value = require<double>(j, "value", "measurement");
  if (!std::isfinite(m.value)) {
    throw ValidationError("measurement: value must be finite");
  }
  m.unit = j.value("unit", std::string{});
  m.provenance =
      provenance_from_name(j.value("provenance", std::string{"sensed"}));
  return m;
}

Json to_json(const arima::ArimaModel& m) {
  Json j;
  j["order"] = Json{{"p", m.order.p}, {"d", m.order.d}, {"q", m.order.q}};
  j["ar_coeffs"] = m.ar;
  j["ma_coeffs"] = m.ma;
  j["intercept"] = m.intercept;
  j["noise_variance"] = m.noise_variance;
  j["fitted_on_length"] = m.fitted_on_length;
  return j;
}

arima::ArimaModel arima_model_from_json(const Json& j) {
  arima::ArimaModel m;
  const Json& order = j.contains("order") ? j.at("order") : Json::object();
  m.order.p = require<int>(order, "p", "arima order");
  m.order.d = require<int>(order, "d", "arima order");
  m.order.q = require<int>(order, "q", "arima order");
  m.ar = require<std::vector<double>>(j, "ar_coeffs", "arima model");
  m.ma = require<std::vector<double>>(j, "ma_coeffs", "arima model");
  m.intercept = require<double>(j, "intercept", "arima model");
  m.noise_variance = require<double>(j, "noise_variance", "arima model");
  m.fitted_on_length = j.value("fitted_on_length", std::int64_t{0});
  return m;
}

Json to_json(const dps::ModelUpdateMsg& msg) {
  Json j;
  j["order"] = Json{{"p", msg.model.order.p},
                    {"d", msg.model.order.d},
                    {"q", msg.model.order.q}};
  j["ar_coeffs"] = msg.model.ar;
  j["ma_coeffs"] = msg.model.ma;
  j["intercept"] = msg.model.intercept;
  j["noise_variance"] = msg.model.noise_variance;
  j["origin_tick"] = msg.origin_tick;
  return j;
}

dps::ModelUpdateMsg model_update_from_json(const Json& j) {
  dps::ModelUpdateMsg msg;
  msg.model = arima_model_from_json(j);
  msg.origin_tick = require<std::int64_t>(j, "origin_tick", "model update");
  return msg;
}

Json to_json(const ReconfigCommand& cmd) {
  Json j;
  j["target_sensor_id"] = cmd.target_sensor_id;
  if (cmd.set_interval_seconds) {
    j["set_interval_seconds"] = *cmd.set_interval_seconds;
  }
  if (cmd.model_update) j["model_update"] = to_json(*cmd.model_update);
  if (cmd.threshold_epsilon) j["threshold_epsilon"] = *cmd.threshold_epsilon;
  if (cmd.substitute_source) {
    j["substitute_source"] = substitute_source_name(*cmd.substitute_source);
  }
  return j;
}

ReconfigCommand reconfig_from_json(const Json& j) {
  ReconfigCommand cmd;
  cmd.target_sensor_id = require<std::string>(j, "target_sensor_id", "reconfig");
  if (j.contains("set_interval_seconds")) {
    cmd.set_interval_seconds =
        require<std::int64_t>(j, "set_interval_seconds", "reconfig");
    if (*cmd.set_interval_seconds <= 0) {
      throw ValidationError("reconfig: set_interval_seconds must be positive");
    }
  }
  if (j.contains("model_update")) {
    cmd.model_update = model_update_from_json(j.at("model_update"));
  }
  if (j.contains("threshold_epsilon")) {
    cmd.threshold_epsilon = require<double>(j, "threshold_epsilon", "reconfig");
    if (!(*cmd.threshold_epsilon > 0.0)) {
      throw ValidationError("reconfig: threshold_epsilon must be positive");
    }
  }
  if (j.contains("substitute_source")) {
    cmd.substitute_source = substitute_source_from_name(
        require<std::string>(j, "substitute_source", "reconfig"));
  }
  return cmd;
}

Json to_json(const rules::ScheduleRule& rule) {
  const auto hhmmss = [](int sod) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d", sod / 3600,
                  sod / 60 % 60, sod % 60);
    return std::string(buf);
  };
  Json j;
  j["default_interval_seconds"] = rule.default_interval_seconds;
  j["evaluation_period_seconds"] = rule.evaluation_period_seconds;
  Json segments = Json::array();
  for (const auto& s : rule.segments) {
    Json seg;
    seg["start"] = hhmmss(s.start_second_of_day);
    seg["end"] = hhmmss(s.end_second_of_day);
    seg["interval_seconds"] = s.interval_seconds;
    segments.push_back(std::move(seg));
  }
  j["segments"] = std::move(segments);
  return j;
}

rules::ScheduleRule schedule_rule_from_json(const Json& j) {
  rules::ScheduleRule rule;
  rule.default_interval_seconds =
      require<int>(j, "default_interval_seconds", "schedule rule");
  rule.evaluation_period_seconds =
      require<int>(j, "evaluation_period_seconds", "schedule rule");
  for (const auto& seg : j.value("segments", Json::array())) {
    rules::ScheduleSegment s;
    s.start_second_of_day =
        parse_time_of_day(require<std::string>(seg, "start", "schedule segment"));
    s.end_second_of_day =
        parse_time_of_day(require<std::string>(seg, "end", "schedule segment"));
    s.interval_seconds = require<int>(seg, "interval_seconds", "schedule segment");
    rule.segments.push_back(s);
  }
  rule.validate();
  return rule;
}

Json to_json(const dps::DpsConfig& cfg) {
  Json j;
  j["threshold_epsilon"] = cfg.threshold_epsilon;
  j["init_phase_ticks"] = cfg.init_phase_ticks;
  j["refresh_interval_ticks"] = cfg.refresh_interval_ticks;
  j["refit_window_ticks"] = cfg.refit_window_ticks;
  Json grid = Json::array();
  for (const auto& o : cfg.order_grid) {
    grid.push_back(Json::array({o.p, o.d, o.q}));
  }
  j["order_grid"] = std::move(grid);
  return j;
}

dps::DpsConfig dps_config_from_json(const Json& j) {
  dps::DpsConfig cfg;
  cfg.threshold_epsilon = j.value("threshold_epsilon", cfg.threshold_epsilon);
  cfg.init_phase_ticks = j.value("init_phase_ticks", cfg.init_phase_ticks);
  cfg.refresh_interval_ticks =
      j.value("refresh_interval_ticks", cfg.refresh_interval_ticks);
  cfg.refit_window_ticks = j.value("refit_window_ticks", cfg.refit_window_ticks);
  if (j.contains("order_grid")) {
    cfg.order_grid.clear();
    for (const auto& o : j.at("order_grid")) {
      if (!o.is_array() || o.size() != 3) {
        throw ValidationError("dps config: order grid entries are [p,d,q]");
      }
      cfg.order_grid.push_back(arima::ArimaOrder{
          o.at(0).get<int>(), o.at(1).get<int>(), o.at(2).get<int>()});
    }
  }
  cfg.validate();
  return cfg;
}

Json to_json(const rules::RelevancePolicy& p) {
  Json j;
  j["agreement_tolerance"] = p.agreement_tolerance;
  j["comparison_window_ticks"] = p.comparison_window_ticks;
  j["relaxed_interval_seconds"] = p.relaxed_interval_seconds;
  j["eager_interval_seconds"] = p.eager_interval_seconds;
  j["evaluation_period_seconds"] = p.evaluation_period_seconds;
  return j;
}

rules::RelevancePolicy relevance_policy_from_json(const Json& j) {
  rules::RelevancePolicy p;
  p.agreement_tolerance = j.value("agreement_tolerance", p.agreement_tolerance);
  p.comparison_window_ticks =
      j.value("comparison_window_ticks", p.comparison_window_ticks);
  p.relaxed_interval_seconds =
      require<std::int64_t>(j, "relaxed_interval_seconds", "relevance policy");
  p.eager_interval_seconds =
      require<std::int64_t>(j, "eager_interval_seconds", "relevance policy");
  p.evaluation_period_seconds =
      j.value("evaluation_period_seconds", p.evaluation_period_seconds);
  p.validate();
  return p;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Json parse_json(const std::string& text, const std::string& context) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ValidationError(context + ": invalid JSON: " + e.what());
  }
}

}  // namespace wsn
