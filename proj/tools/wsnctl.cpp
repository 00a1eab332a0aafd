// Operator entry point: hosts the dashboard and weather stub, runs
// scenarios against a live dashboard, replays traces through the dual
// prediction scheme offline and audits emitted report bundles.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "wsn/dashboard.hpp"
#include "wsn/error.hpp"
#include "wsn/signal.hpp"
#include "wsn/simulator.hpp"
#include "wsn/time_util.hpp"
#include "wsn/weather.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitTransport = 3;
constexpr int kExitFit = 4;

std::atomic<bool> g_shutdown{false};

void handle_signal(int) { g_shutdown.store(true); }

int port_from_env(const char* name, int fallback) {
  const char* v = std::getenv(name);
  return v ? std::atoi(v) : fallback;
}

wsn::Json load_json_file(const std::filesystem::path& path,
                         const std::string& what) {
  std::ifstream in(path);
  if (!in) throw wsn::ValidationError("cannot open " + what + ": " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return wsn::parse_json(buf.str(), what);
}

int cmd_serve(const std::filesystem::path& config_path) {
  const wsn::Json cfg = load_json_file(config_path, "service config");
  const wsn::Json dj = cfg.value("dashboard", wsn::Json::object());

  std::unique_ptr<wsn::weather::StubWeatherServer> weather;
  std::string weather_url = cfg.value("weather_url", std::string{});
  if (cfg.contains("weather")) {
    const wsn::Json wj = cfg.at("weather");
    const auto fixtures = std::filesystem::path(
        wj.value("fixtures_dir", std::string{"fixtures/weather"}));
    const int wport =
        port_from_env("WSN_WEATHER_PORT", wj.value("port", 7610));
    weather = std::make_unique<wsn::weather::StubWeatherServer>(
        wsn::weather::FixtureSet::load(fixtures), wport);
    weather_url = weather->base_url();
    std::cout << "weather stub listening on " << weather->base_url() << "\n";
  }

  wsn::dash::DashboardConfig dc;
  dc.port = port_from_env("WSN_DASHBOARD_PORT", dj.value("port", 7600));
  dc.data_dir = dj.value("data_dir", std::string{"./wsn_data"});
  dc.weather_base_url = weather_url;
  wsn::dash::DashboardService dashboard(dc);
  dashboard.start();
  std::cout << "dashboard listening on " << dashboard.base_url()
            << " (data dir " << dc.data_dir.string() << ")\n"
            << "ready\n"
            << std::flush;

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_shutdown.load()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  std::cout << "shutting down\n";
  dashboard.stop();
  if (weather) weather->stop();
  return 0;
}

void write_run_info(const std::filesystem::path& dir, double runtime_seconds,
                    const std::string& detail) {
  // Kept outside the deterministic bundle files on purpose: wallclock
  // runtime differs between byte-identical runs.
  std::ofstream out(dir / "run_info.txt", std::ios::trunc);
  out << "runtime_seconds=" << runtime_seconds << "\n" << detail;
}

void print_report(const wsn::sim::SimReport& report) {
  std::cout << "scenario: " << report.scenario_name << " (seed " << report.seed
            << ")\n";
  for (const auto& n : report.nodes) {
    std::cout << "  " << n.sensor_id << ": samples " << n.samples_taken
              << ", tx " << n.transmissions << ", suppressed "
              << n.suppressions << ", rx " << n.receptions
              << ", max reconstruction error "
              << wsn::format_double(n.max_reconstruction_error)
              << ", energy spent "
              << wsn::format_double(n.energy_spent_joules) << " J"
              << (n.halted ? " [halted]" : "") << "\n";
  }
  std::cout << "  total: " << report.total_transmissions << "/"
            << report.total_samples << " transmitted, reduction ratio "
            << wsn::format_double(report.tx_reduction_ratio) << "\n";
}

int cmd_simulate(const std::filesystem::path& scenario_path,
                 const std::filesystem::path& output_dir, bool embedded,
                 std::string dashboard_url,
                 std::optional<std::uint64_t> seed_override) {
  wsn::sim::ScenarioConfig scenario =
      wsn::sim::ScenarioConfig::load(scenario_path);
  if (seed_override) scenario.seed = *seed_override;

  std::optional<wsn::sim::EmbeddedStack> stack;
  std::filesystem::path embedded_data;
  if (embedded) {
    embedded_data = std::filesystem::temp_directory_path() /
                    ("wsnctl_embedded_" +
                     std::to_string(std::chrono::steady_clock::now()
                                        .time_since_epoch()
                                        .count()));
    stack = wsn::sim::start_embedded_stack(scenario, embedded_data);
    dashboard_url = stack->dashboard_url();
  } else if (dashboard_url.empty()) {
    const char* env = std::getenv("WSN_DASHBOARD_URL");
    dashboard_url = env ? env : "http://127.0.0.1:7600";
  }

  const auto t0 = std::chrono::steady_clock::now();
  const wsn::sim::ReportBundle bundle =
      wsn::sim::run_scenario(scenario, dashboard_url);
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  wsn::sim::write_bundle(output_dir, bundle);
  write_run_info(output_dir, runtime,
                 "scenario=" + scenario_path.string() + "\ndashboard=" +
                     dashboard_url + "\n");
  print_report(bundle.report);
  std::cout << "bundle written to " << output_dir.string() << " ("
            << wsn::format_double(runtime) << " s)\n";

  if (stack) {
    stack->dashboard->stop();
    if (stack->weather) stack->weather->stop();
    std::filesystem::remove_all(embedded_data);
  }
  return 0;
}

int cmd_replay(const std::filesystem::path& trace_path,
               const std::filesystem::path& output_dir, double epsilon,
               std::int64_t init_ticks, std::int64_t refresh_ticks,
               std::int64_t interval_seconds) {
  const auto rows = wsn::sim::load_trace(trace_path);
  std::vector<double> values;
  values.reserve(rows.size());
  for (const auto& [_, v] : rows) values.push_back(v);

  wsn::dps::DpsConfig config;
  config.threshold_epsilon = epsilon;
  config.init_phase_ticks = init_ticks;
  config.refresh_interval_ticks = refresh_ticks;

  const auto t0 = std::chrono::steady_clock::now();
  const wsn::sim::ReportBundle bundle = wsn::sim::replay_trace(
      values, config, interval_seconds, rows.front().first);
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  wsn::sim::write_bundle(output_dir, bundle);
  write_run_info(output_dir, runtime, "trace=" + trace_path.string() + "\n");

  const auto& n = bundle.report.nodes.front();
  const std::int64_t predicting =
      n.samples_taken - config.init_phase_ticks > 0
          ? n.samples_taken - config.init_phase_ticks
          : 0;
  std::cout << "replayed " << n.samples_taken << " samples: " << n.transmissions
            << " transmitted, " << n.suppressions << " suppressed\n"
            << "suppression ratio after init: "
            << wsn::format_double(
                   predicting > 0
                       ? static_cast<double>(n.suppressions) /
                             static_cast<double>(predicting)
                       : 0.0)
            << "\nmax reconstruction error: "
            << wsn::format_double(n.max_reconstruction_error) << " (threshold "
            << wsn::format_double(epsilon) << ")\n"
            << "bundle written to " << output_dir.string() << "\n";
  return 0;
}

int cmd_report(const std::filesystem::path& bundle_dir) {
  const wsn::sim::ReportBundle bundle = wsn::sim::read_bundle(bundle_dir);
  const wsn::sim::SimReport recomputed = wsn::sim::summarize_from_logs(bundle);
  std::string why;
  if (!wsn::sim::reports_equal(bundle.report, recomputed, &why)) {
    std::cerr << "report.json does not match its own logs: " << why << "\n";
    return kExitValidation;
  }
  std::cout << "summary verified against per-tick logs\n";
  print_report(recomputed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-managed sensor network platform"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "run the dashboard service");
  std::string serve_config = "config.json";
  serve->add_option("--config", serve_config, "service configuration file");

  auto* simulate =
      app.add_subcommand("simulate", "run a scenario against a dashboard");
  std::string scenario_path;
  std::string output_dir = "out";
  std::string dashboard_url;
  bool embedded = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--output", output_dir, "bundle output directory");
  simulate->add_option("--dashboard", dashboard_url, "dashboard base URL");
  simulate->add_flag("--embedded", embedded,
                     "host dashboard and weather stub in-process");
  simulate->add_option("--seed", seed, "override the scenario seed")
      ->each([&](const std::string&) { seed_set = true; });

  auto* replay =
      app.add_subcommand("replay", "run the DPS offline over a trace file");
  std::string trace_path;
  std::string replay_out = "replay_out";
  double epsilon = 0.5;
  std::int64_t init_ticks = 60;
  std::int64_t refresh_ticks = 120;
  std::int64_t interval_seconds = 60;
  replay->add_option("--trace", trace_path, "trace csv (timestamp,value)")
      ->required();
  replay->add_option("--output", replay_out, "bundle output directory");
  replay->add_option("--epsilon", epsilon, "suppression threshold");
  replay->add_option("--init", init_ticks, "initialization phase ticks");
  replay->add_option("--refresh", refresh_ticks, "model refresh interval");
  replay->add_option("--interval", interval_seconds,
                     "seconds between trace samples");

  auto* report =
      app.add_subcommand("report", "recompute a bundle summary from its logs");
  std::string bundle_dir;
  report->add_option("--bundle", bundle_dir, "bundle directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) return cmd_serve(serve_config);
    if (simulate->parsed()) {
      return cmd_simulate(scenario_path, output_dir, embedded, dashboard_url,
                          seed_set ? std::optional<std::uint64_t>(seed)
                                   : std::nullopt);
    }
    if (replay->parsed()) {
      return cmd_replay(trace_path, replay_out, epsilon, init_ticks,
                        refresh_ticks, interval_seconds);
    }
    if (report->parsed()) return cmd_report(bundle_dir);
  } catch (const wsn::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const wsn::TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const wsn::FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return kExitFit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
