#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "wsn/commands.hpp"
#include "wsn/dps.hpp"
#include "wsn/events.hpp"
#include "wsn/rules.hpp"
#include "wsn/store.hpp"
#include "wsn/weather.hpp"

namespace wsn::dash {

struct RelevanceRuleConfig {
  rules::RelevancePolicy policy;
  std::string location;
};

// Everything the dashboard needs to know about one sensor to run its
// analytics: posted once at scenario setup via POST /sensors.
struct SensorRegistration {
  std::string sensor_id;
  std::string gateway_id;
  std::string unit = "C";
  std::int64_t initial_interval_seconds = 60;
  std::int64_t start_wallclock = 0;  // wallclock of simulated second 0
  std::optional<dps::DpsConfig> dps;
  std::optional<rules::ScheduleRule> schedule_rule;
  std::optional<RelevanceRuleConfig> relevance;
};

struct DashboardConfig {
  int port = 0;  // 0: pick any free port
  std::filesystem::path data_dir;
  std::string weather_base_url;  // empty: no weather access configured
  std::size_t event_queue_capacity = 1024;
};

struct MetricsSnapshot {
  std::int64_t ingested = 0;
  std::int64_t conflicts = 0;
  std::int64_t stored_total = 0;
  std::int64_t stored_sensed = 0;
  std::int64_t stored_dps_reconstructed = 0;  // suppressed-equivalent stored
  std::int64_t stored_weather_forecast = 0;
  std::int64_t events_delivered = 0;
  std::int64_t events_dropped = 0;
  std::int64_t listeners = 0;
  std::int64_t sensors = 0;
  std::int64_t commands_queued = 0;
  std::int64_t commands_picked_up = 0;
  std::int64_t commands_applied = 0;
  std::int64_t commands_failed = 0;
};

enum class CommandState { queued, picked_up, applied, failed };

const char* command_state_name(CommandState s);

// The DASD: ingests measurements over HTTP, stores them append-only,
// publishes events to registered socket listeners, runs the per-sensor
// analytics (DPS sink, schedule rule, weather relevance rule) and queues
// reconfiguration commands for gateways to pick up.
//
// Concurrency: per-sensor state is owned by one actor guarded by its own
// mutex; the store and event bus are internally synchronized; event
// delivery runs on per-listener queues so a slow listener cannot stall
// ingestion.
class DashboardService {
 public:
  explicit DashboardService(DashboardConfig config);
  ~DashboardService();

  DashboardService(const DashboardService&) = delete;
  DashboardService& operator=(const DashboardService&) = delete;

  // Binds and serves; throws TransportError when the port is taken.
  void start();
  void stop();

  int port() const { return port_; }
  std::string base_url() const;

  MeasurementStore& store() { return store_; }
  MetricsSnapshot metrics() const;

 private:
  struct SensorActor;
  struct PendingCommand {
    std::int64_t command_id = 0;
    ReconfigCommand command;
    std::string gateway_id;
    CommandState state = CommandState::queued;
    std::string detail;
  };

  void install_routes();
  SensorActor* find_actor(const std::string& sensor_id);

  std::int64_t queue_command(const ReconfigCommand& cmd,
                             const std::string& gateway_id);
  void apply_command_to_sink(SensorActor& actor, const ReconfigCommand& cmd);

  void handle_after_sample(SensorActor& actor, std::int64_t wallclock);
  void dps_refresh_check(SensorActor& actor);
  void rules_time_advance(SensorActor& actor, std::int64_t wallclock);
  void run_relevance_evaluation(SensorActor& actor, std::int64_t boundary);
  void fill_from_weather(SensorActor& actor, std::int64_t up_to);

  DashboardConfig config_;
  MeasurementStore store_;
  EventBus events_;
  std::optional<weather::WeatherClient> weather_;

  struct Impl;  // httplib server lives behind the wall
  std::unique_ptr<Impl> impl_;
  int port_ = 0;

  mutable std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<SensorActor>> actors_;

  mutable std::mutex commands_mutex_;
  std::int64_t next_command_id_ = 1;
  std::vector<PendingCommand> commands_;

  std::atomic<std::int64_t> ingested_{0};
  std::atomic<std::int64_t> conflicts_{0};
};

}  // namespace wsn::dash
