#pragma once

#include <memory>
#include <optional>
#include <string>

#include "wsn/report.hpp"
#include "wsn/scenario.hpp"
#include "wsn/weather.hpp"

namespace wsn::sim {

// Thin JSON-over-HTTP client for the dashboard; shared by the gateway, the
// CLI and the integration tests. Non-2xx responses and connection failures
// surface as TransportError (with the body attached).
class DashboardClient {
 public:
  explicit DashboardClient(std::string base_url);
  ~DashboardClient();

  Json post(const std::string& path, const Json& body);
  Json get(const std::string& path);

  const std::string& base_url() const { return base_url_; }

 private:
  struct Impl;
  std::string base_url_;
  std::unique_ptr<Impl> impl_;
};

// Drives the discrete-event loop: samples every node at its own cadence,
// forwards transmissions through the gateway to the dashboard's real HTTP
// interface, delivers reconfiguration commands between ticks and accounts
// for energy. Deterministic for a fixed scenario and seed.
ReportBundle run_scenario(const ScenarioConfig& config,
                          const std::string& dashboard_url);

// Offline node/sink co-simulation over a raw value trace; no service
// involved. This is the `replay` engine.
ReportBundle replay_trace(const std::vector<double>& values,
                          const dps::DpsConfig& config,
                          std::int64_t interval_seconds,
                          std::int64_t start_wallclock,
                          const std::string& sensor_id = "replay");

// Dashboard (+ weather stub when the scenario needs one) hosted in-process
// on ephemeral ports, for --embedded runs and the test suites.
struct EmbeddedStack {
  std::unique_ptr<weather::StubWeatherServer> weather;
  std::unique_ptr<dash::DashboardService> dashboard;

  std::string dashboard_url() const { return dashboard->base_url(); }
};

EmbeddedStack start_embedded_stack(const ScenarioConfig& config,
                                   const std::filesystem::path& data_dir);

}  // namespace wsn::sim
