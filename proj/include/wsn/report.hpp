#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wsn/energy.hpp"
#include "wsn/json_io.hpp"

namespace wsn::sim {

struct NodeReport {
  std::string sensor_id;
  std::int64_t samples_taken = 0;
  std::int64_t transmissions = 0;
  std::int64_t suppressions = 0;
  std::int64_t receptions = 0;
  std::int64_t model_updates_applied = 0;
  double energy_spent_joules = 0.0;
  double final_battery_joules = 0.0;
  double max_reconstruction_error = 0.0;
  bool halted = false;
  EnergyModel energy_costs;  // echoed so summaries can be recomputed
};

struct SimReport {
  std::string scenario_name;
  std::uint64_t seed = 0;
  std::int64_t duration_seconds = 0;
  std::vector<NodeReport> nodes;  // sorted by sensor_id
  std::int64_t total_samples = 0;
  std::int64_t total_transmissions = 0;
  double tx_reduction_ratio = 0.0;  // vs the transmit-every-sample baseline
};

// One row per node sample. phase: initializing / predicting / none (no DPS).
struct SampleLogRow {
  std::string sensor_id;
  std::int64_t sample_tick = 0;  // per-node sample ordinal
  std::int64_t sim_time_s = 0;
  std::int64_t wallclock = 0;
  std::string phase;
  bool transmitted = false;
  double true_value = 0.0;
  double stored_value = 0.0;  // value entering the shared history / store
  double abs_error = 0.0;
};

struct IntervalLogRow {
  std::int64_t sim_time_s = 0;
  std::string sensor_id;
  std::int64_t interval_seconds = 0;
};

struct CommandLogRow {
  std::int64_t sim_time_s = 0;
  std::int64_t command_id = 0;
  std::string sensor_id;
  std::string kind;
  std::string detail;
};

struct ReportBundle {
  SimReport report;
  std::vector<SampleLogRow> samples;
  std::vector<IntervalLogRow> intervals;
  std::vector<CommandLogRow> commands;
};

Json report_to_json(const SimReport& report);
SimReport report_from_json(const Json& j);

// Writes report.json, transmissions.csv, intervals.csv and commands.csv.
// Every file is a deterministic function of the bundle contents.
void write_bundle(const std::filesystem::path& dir, const ReportBundle& bundle);

ReportBundle read_bundle(const std::filesystem::path& dir);

// Recomputes the summary from the per-row logs alone; `report` uses it to
// audit that the numbers in report.json follow from the logs.
SimReport summarize_from_logs(const ReportBundle& bundle);

// Field-by-field comparison; fills `why` with the first difference.
bool reports_equal(const SimReport& a, const SimReport& b, std::string* why);

}  // namespace wsn::sim
