#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wsn/dashboard.hpp"
#include "wsn/dps.hpp"
#include "wsn/energy.hpp"
#include "wsn/rules.hpp"
#include "wsn/signal.hpp"

namespace wsn::sim {

struct NodeSpec {
  std::string sensor_id;
  SignalSource signal;
  std::int64_t initial_interval_seconds = 60;
  EnergyModel energy;
  bool dps_enabled = false;
  std::optional<rules::ScheduleRule> schedule_rule;
  std::optional<dash::RelevanceRuleConfig> relevance;
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 0;
  std::int64_t duration_seconds = 3600;
  std::int64_t start_wallclock = 0;
  std::string gateway_id = "gw-1";
  std::int64_t clock_beacon_seconds = 0;  // 0: no clock beacons
  dps::DpsConfig dps;
  std::vector<NodeSpec> nodes;
  std::filesystem::path weather_fixtures_dir;  // for the embedded stub

  bool any_rules() const;
  bool any_relevance() const;

  // Parses and validates, reporting every violation at once. Relative paths
  // (traces, fixtures) resolve against the scenario file's directory.
  static ScenarioConfig load(const std::filesystem::path& path);

  // Per-node signal seed: explicit seed when the file gave one, otherwise
  // derived from the scenario seed and the sensor id.
  std::uint64_t node_seed(const NodeSpec& node) const;
};

}  // namespace wsn::sim
