#include "wsn/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "wsn/error.hpp"
#include "wsn/json_io.hpp"
#include "wsn/time_util.hpp"

namespace wsn::sim {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

SignalSource signal_from_json(const Json& j,
                              const std::filesystem::path& base_dir,
                              std::vector<std::string>& problems,
                              const std::string& who) {
  SignalSource src;
  const std::string kind = j.value("kind", std::string{"synthetic"});
  if (kind == "synthetic") {
    src.kind = SignalKind::synthetic;
    src.base_level = j.value("base_level", 20.0);
    src.daily_amplitude = j.value("daily_amplitude", 0.0);
    src.noise_std = j.value("noise_std", 0.0);
    src.seed = j.value("seed", std::uint64_t{0});
    if (src.noise_std < 0.0) {
      problems.push_back(who + ": noise_std must be >= 0");
    }
  } else if (kind == "trace_file") {
    src.kind = SignalKind::trace_file;
    const std::string path = j.value("path", std::string{});
    if (path.empty()) {
      problems.push_back(who + ": trace signal needs a 'path'");
    } else {
      src.trace_path = std::filesystem::path(path).is_absolute()
                           ? std::filesystem::path(path)
                           : base_dir / path;
      if (!std::filesystem::exists(src.trace_path)) {
        problems.push_back(who + ": trace file not found: " +
                           src.trace_path.string());
      }
    }
  } else {
    problems.push_back(who + ": unknown signal kind '" + kind + "'");
  }
  return src;
}

}  // namespace

bool ScenarioConfig::any_rules() const {
  for (const auto& n : nodes) {
    if (n.schedule_rule || n.relevance) return true;
  }
  return false;
}

bool ScenarioConfig::any_relevance() const {
  for (const auto& n : nodes) {
    if (n.relevance) return true;
  }
  return false;
}

std::uint64_t ScenarioConfig::node_seed(const NodeSpec& node) const {
  if (node.signal.seed != 0) return node.signal.seed;
  return seed ^ fnv1a(node.sensor_id);
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const Json j = parse_json(buffer.str(), "scenario " + path.string());
  const auto base_dir = path.parent_path();

  std::vector<std::string> problems;
  ScenarioConfig cfg;
  cfg.name = j.value("name", path.stem().string());
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.duration_seconds = j.value("duration_seconds", std::int64_t{0});
  if (cfg.duration_seconds <= 0) {
    problems.push_back("duration_seconds must be positive");
  }
  if (j.contains("start_wallclock")) {
    try {
      cfg.start_wallclock =
          parse_iso8601_utc(j.at("start_wallclock").get<std::string>());
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }
  cfg.gateway_id = j.value("gateway_id", std::string{"gw-1"});
  cfg.clock_beacon_seconds = j.value("clock_beacon_seconds", std::int64_t{0});
  if (cfg.clock_beacon_seconds < 0) {
    problems.push_back("clock_beacon_seconds must be >= 0");
  }

  if (j.contains("dps")) {
    try {
      cfg.dps = dps_config_from_json(j.at("dps"));
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }
  if (j.contains("weather_fixtures_dir")) {
    const std::string dir = j.at("weather_fixtures_dir").get<std::string>();
    cfg.weather_fixtures_dir = std::filesystem::path(dir).is_absolute()
                                   ? std::filesystem::path(dir)
                                   : base_dir / dir;
  }

  std::set<std::string> seen_ids;
  for (const auto& nj : j.value("nodes", Json::array())) {
    NodeSpec node;
    node.sensor_id = nj.value("sensor_id", std::string{});
    const std::string who = "node '" + node.sensor_id + "'";
    if (node.sensor_id.empty()) {
      problems.push_back("every node needs a sensor_id");
    } else if (!seen_ids.insert(node.sensor_id).second) {
      problems.push_back("duplicate sensor_id '" + node.sensor_id + "'");
    }
    node.initial_interval_seconds =
        nj.value("initial_interval_seconds", std::int64_t{60});
    if (node.initial_interval_seconds <= 0) {
      problems.push_back(who + ": initial_interval_seconds must be positive");
    }
    node.dps_enabled = nj.value("dps_enabled", false);
    if (nj.contains("signal")) {
      node.signal = signal_from_json(nj.at("signal"), base_dir, problems, who);
    }
    if (nj.contains("energy")) {
      const Json& ej = nj.at("energy");
      node.energy.battery_joules = ej.value("battery_joules", 100.0);
      node.energy.cost_sample_joules = ej.value("cost_sample_joules", 0.002);
      node.energy.cost_tx_joules = ej.value("cost_tx_joules", 0.05);
      node.energy.cost_rx_joules = ej.value("cost_rx_joules", 0.03);
      if (node.energy.battery_joules <= 0.0 ||
          node.energy.cost_sample_joules < 0.0 ||
          node.energy.cost_tx_joules < 0.0 ||
          node.energy.cost_rx_joules < 0.0) {
        problems.push_back(who + ": bad energy model");
      }
    }
    if (nj.contains("schedule_rule") && !nj.at("schedule_rule").is_null()) {
      try {
        node.schedule_rule = schedule_rule_from_json(nj.at("schedule_rule"));
      } catch (const Error& e) {
        problems.push_back(who + ": " + e.what());
      }
    }
    if (nj.contains("relevance") && !nj.at("relevance").is_null()) {
      try {
        dash::RelevanceRuleConfig conf;
        conf.policy = relevance_policy_from_json(nj.at("relevance"));
        conf.location = nj.at("relevance").value("location", std::string{});
        if (conf.location.empty()) {
          problems.push_back(who + ": relevance rule needs a 'location'");
        }
        node.relevance = std::move(conf);
      } catch (const Error& e) {
        problems.push_back(who + ": " + e.what());
      }
    }
    cfg.nodes.push_back(std::move(node));
  }
  if (cfg.nodes.empty()) problems.push_back("scenario has no nodes");

  if (cfg.clock_beacon_seconds == 0 && cfg.any_rules()) {
    cfg.clock_beacon_seconds = 60;
  }
  if (cfg.clock_beacon_seconds > 0) {
    for (const auto& n : cfg.nodes) {
      const auto check_period = [&](int period, const char* what) {
        if (period % cfg.clock_beacon_seconds != 0) {
          problems.push_back("node '" + n.sensor_id + "': " + what +
                             " evaluation period must be a multiple of the "
                             "clock beacon");
        }
      };
      if (n.schedule_rule) {
        check_period(n.schedule_rule->evaluation_period_seconds, "schedule");
      }
      if (n.relevance) {
        check_period(n.relevance->policy.evaluation_period_seconds, "relevance");
      }
    }
  }
  if (cfg.any_relevance() && cfg.weather_fixtures_dir.empty()) {
    problems.push_back(
        "a relevance rule is configured but weather_fixtures_dir is missing");
  }

  if (!problems.empty()) {
    std::string msg = "scenario " + path.string() + " is invalid:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
  return cfg;
}

}  // namespace wsn::sim
