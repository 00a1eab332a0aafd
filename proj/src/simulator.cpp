#include "wsn/simulator.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "wsn/error.hpp"
#include "wsn/time_util.hpp"

namespace wsn::sim {

struct DashboardClient::Impl {
  httplib::Client cli;
  explicit Impl(const std::string& url) : cli(url) {
    cli.set_connection_timeout(2, 0);
    cli.set_read_timeout(30, 0);
    cli.set_keep_alive(true);
  }
};

DashboardClient::DashboardClient(std::string base_url)
    : base_url_(std::move(base_url)),
      impl_(std::make_unique<Impl>(base_url_)) {}

DashboardClient::~DashboardClient() = default;

namespace {

Json check_response(const httplib::Result& res, const std::string& what) {
  if (!res) {
    throw TransportError("dashboard unreachable (" + what + "): " +
                         httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("dashboard " + what + " returned " +
                         std::to_string(res->status) + ": " + res->body);
  }
  return parse_json(res->body, what);
}

}  // namespace

Json DashboardClient::post(const std::string& path, const Json& body) {
  return check_response(impl_->cli.Post(path, body.dump(), "application/json"),
                        "POST " + path);
}

Json DashboardClient::get(const std::string& path) {
  return check_response(impl_->cli.Get(path), "GET " + path);
}

namespace {

struct SimNode {
  NodeSpec spec;
  std::unique_ptr<SignalSampler> sampler;
  std::int64_t interval = 60;
  std::int64_t next_sample = 0;
  dps::DpsNodeState dps_state;
  dps::DpsConfig dps_config;
  double battery = 0.0;
  bool halted = false;
  bool depleted_this_tick = false;

  NodeReport report;

  // Charges one event; flags the tick when the battery crossed zero.
  void charge(EnergyEvent event) {
    const double before = battery;
    battery = std::max(0.0, battery - event_cost(spec.energy, event));
    if (before > 0.0 && battery == 0.0) depleted_this_tick = true;
  }
};

Json registration_json(const ScenarioConfig& cfg, const NodeSpec& node) {
  Json j;
  j["sensor_id"] = node.sensor_id;
  j["gateway_id"] = cfg.gateway_id;
  j["unit"] = "C";
  j["initial_interval_seconds"] = node.initial_interval_seconds;
  j["start_wallclock"] = format_iso8601_utc(cfg.start_wallclock);
  if (node.dps_enabled) j["dps"] = to_json(cfg.dps);
  if (node.schedule_rule) j["schedule_rule"] = to_json(*node.schedule_rule);
  if (node.relevance) {
    Json r = to_json(node.relevance->policy);
    r["location"] = node.relevance->location;
    j["relevance"] = std::move(r);
  }
  return j;
}

}  // namespace

ReportBundle run_scenario(const ScenarioConfig& config,
                          const std::string& dashboard_url) {
  DashboardClient client(dashboard_url);
  client.get("/metrics");  // reachability gate before any state is created

  ReportBundle bundle;
  bundle.report.scenario_name = config.name;
  bundle.report.seed = config.seed;
  bundle.report.duration_seconds = config.duration_seconds;

  std::map<std::string, SimNode> nodes;
  for (const auto& spec : config.nodes) {
    client.post("/sensors", registration_json(config, spec));
    SimNode node;
    node.spec = spec;
    SignalSource src = spec.signal;
    src.seed = config.node_seed(spec);
    node.sampler = std::make_unique<SignalSampler>(src, config.start_wallclock);
    node.interval = spec.initial_interval_seconds;
    node.battery = spec.energy.battery_joules;
    if (spec.dps_enabled) {
      node.dps_config = config.dps;
      node.dps_state = dps::make_node_state(0, node.interval);
    }
    node.report.sensor_id = spec.sensor_id;
    node.report.energy_costs = spec.energy;
    bundle.intervals.push_back(IntervalLogRow{0, spec.sensor_id, node.interval});
    nodes.emplace(spec.sensor_id, std::move(node));
  }

  bool activity_since_poll = false;
  for (std::int64_t t = 0; t < config.duration_seconds; ++t) {
    const std::int64_t wallclock = config.start_wallclock + t;

    if (config.clock_beacon_seconds > 0 && t % config.clock_beacon_seconds == 0) {
      Json beacon;
      beacon["wallclock"] = format_iso8601_utc(wallclock);
      client.post("/sim/clock", beacon);
      activity_since_poll = true;
    }

    if (activity_since_poll) {
      activity_since_poll = false;
      const Json pending =
          client.get("/reconfig/pending?gateway=" + config.gateway_id);
      for (const auto& cj : pending.at("commands")) {
        const std::int64_t command_id = cj.at("command_id").get<std::int64_t>();
        const ReconfigCommand cmd = reconfig_from_json(cj);
        const auto it = nodes.find(cmd.target_sensor_id);
        const auto ack = [&](bool applied, const std::string& detail) {
          Json a;
          a["command_id"] = command_id;
          a["applied"] = applied;
          a["detail"] = detail;
          client.post("/reconfig/ack", a);
        };
        if (it == nodes.end()) {
          ack(false, "node not part of this scenario");
          continue;
        }
        SimNode& node = it->second;
        if (node.halted) {
          ack(false, "node halted");
          continue;
        }
        node.charge(EnergyEvent::rx);
        node.report.receptions += 1;

        std::string kind;
        std::string detail;
        bool applied = true;
        if (cmd.set_interval_seconds) {
          node.interval = *cmd.set_interval_seconds;
          bundle.intervals.push_back(
              IntervalLogRow{t, node.spec.sensor_id, node.interval});
          kind = "set_interval";
          detail = std::to_string(node.interval);
        }
        if (cmd.threshold_epsilon) {
          node.dps_config.threshold_epsilon = *cmd.threshold_epsilon;
          kind = kind.empty() ? "set_threshold" : kind;
          detail = detail.empty() ? format_double(*cmd.threshold_epsilon) : detail;
        }
        if (cmd.model_update) {
          if (dps::apply_model_update(node.dps_state, *cmd.model_update)) {
            node.report.model_updates_applied += 1;
            kind = "model_update";
            const auto& order = cmd.model_update->model.order;
            detail = "p" + std::to_string(order.p) + "d" +
                     std::to_string(order.d) + "q" + std::to_string(order.q) +
                     " origin " + std::to_string(cmd.model_update->origin_tick);
          } else {
            applied = false;
            detail = "invalid model rejected";
          }
        }
        if (cmd.substitute_source) {
          if (kind.empty()) kind = "substitute_source";
          if (detail.empty()) {
            detail = substitute_source_name(*cmd.substitute_source);
          }
        }
        ack(applied, detail);
        bundle.commands.push_back(CommandLogRow{
            t, command_id, node.spec.sensor_id, kind, detail});
        if (node.depleted_this_tick) {
          node.depleted_this_tick = false;
          node.halted = true;
          node.report.halted = true;
          Json f;
          f["sensor_id"] = node.spec.sensor_id;
          f["description"] = "battery depleted";
          f["wallclock"] = format_iso8601_utc(wallclock);
          client.post("/failures", f);
        }
      }
    }

    for (auto& [id, node] : nodes) {
      if (node.halted || node.next_sample != t) continue;
      const double value = node.sampler->sample(t);
      node.report.samples_taken += 1;
      node.charge(EnergyEvent::sample);

      SampleLogRow row;
      row.sensor_id = id;
      row.sim_time_s = t;
      row.wallclock = wallclock;
      row.true_value = value;

      Json measurement;
      measurement["sensor_id"] = id;
      measurement["tick"] = t;
      measurement["wallclock"] = format_iso8601_utc(wallclock);
      measurement["value"] = value;
      measurement["unit"] = "C";
      measurement["provenance"] = "sensed";

      if (node.spec.dps_enabled) {
        row.phase = dps::phase_name(node.dps_state.phase);
        const dps::NodeDecision decision =
            dps::node_step(node.dps_state, value, node.dps_config);
        row.sample_tick = node.dps_state.tick - 1;
        row.transmitted = decision.transmitted;
        row.stored_value = node.dps_state.shared_history.values.back();
        row.abs_error = std::abs(value - row.stored_value);
        node.report.max_reconstruction_error = std::max(
            node.report.max_reconstruction_error, row.abs_error);
        if (decision.transmitted) {
          client.post("/measurements", measurement);
          node.charge(EnergyEvent::tx);
          node.report.transmissions += 1;
        } else {
          Json tick;
          tick["sensor_id"] = id;
          tick["tick"] = t;
          tick["wallclock"] = format_iso8601_utc(wallclock);
          client.post("/sim/tick", tick);
          node.report.suppressions += 1;
        }
      } else {
        row.phase = "none";
        row.sample_tick = node.report.samples_taken - 1;
        row.transmitted = true;
        row.stored_value = value;
        row.abs_error = 0.0;
        client.post("/measurements", measurement);
        node.charge(EnergyEvent::tx);
        node.report.transmissions += 1;
      }
      bundle.samples.push_back(std::move(row));
      node.next_sample += node.interval;
      activity_since_poll = true;

      if (node.depleted_this_tick) {
        node.depleted_this_tick = false;
        node.halted = true;
        node.report.halted = true;
        Json f;
        f["sensor_id"] = id;
        f["description"] = "battery depleted";
        f["wallclock"] = format_iso8601_utc(wallclock);
        client.post("/failures", f);
      }
    }
  }

  for (auto& [id, node] : nodes) {
    NodeReport& r = node.report;
    r.energy_spent_joules =
        node.spec.energy.cost_sample_joules * static_cast<double>(r.samples_taken) +
        node.spec.energy.cost_tx_joules * static_cast<double>(r.transmissions) +
        node.spec.energy.cost_rx_joules * static_cast<double>(r.receptions);
    r.final_battery_joules = node.battery;
    bundle.report.total_samples += r.samples_taken;
    bundle.report.total_transmissions += r.transmissions;
    bundle.report.nodes.push_back(r);
  }
  bundle.report.tx_reduction_ratio =
      bundle.report.total_samples == 0
          ? 0.0
          : 1.0 - static_cast<double>(bundle.report.total_transmissions) /
                      static_cast<double>(bundle.report.total_samples);
  return bundle;
}

ReportBundle replay_trace(const std::vector<double>& values,
                          const dps::DpsConfig& config,
                          std::int64_t interval_seconds,
                          std::int64_t start_wallclock,
                          const std::string& sensor_id) {
  const dps::CosimResult cosim = run_cosim(values, config);

  ReportBundle bundle;
  bundle.report.scenario_name = "replay";
  bundle.report.duration_seconds =
      static_cast<std::int64_t>(values.size()) * interval_seconds;

  for (const auto& row : cosim.rows) {
    SampleLogRow out;
    out.sensor_id = sensor_id;
    out.sample_tick = row.tick;
    out.sim_time_s = row.tick * interval_seconds;
    out.wallclock = start_wallclock + out.sim_time_s;
    out.phase = dps::phase_name(row.phase);
    out.transmitted = row.transmitted;
    out.true_value = row.truth;
    out.stored_value = row.stored;
    out.abs_error = row.abs_error;
    bundle.samples.push_back(std::move(out));
  }
  bundle.intervals.push_back(IntervalLogRow{0, sensor_id, interval_seconds});
  for (std::size_t i = 0; i < cosim.refresh_ticks.size(); ++i) {
    bundle.commands.push_back(CommandLogRow{
        cosim.refresh_ticks[i] * interval_seconds,
        static_cast<std::int64_t>(i + 1), sensor_id, "model_update", ""});
  }

  NodeReport node;
  node.sensor_id = sensor_id;
  node.samples_taken = static_cast<std::int64_t>(cosim.rows.size());
  node.transmissions = cosim.transmissions;
  node.suppressions = cosim.suppressions;
  node.receptions = static_cast<std::int64_t>(cosim.refresh_ticks.size());
  node.model_updates_applied = cosim.model_updates;
  node.max_reconstruction_error = cosim.max_reconstruction_error;
  node.energy_costs = EnergyModel{0.0, 0.0, 0.0, 0.0};
  bundle.report.nodes.push_back(node);
  bundle.report.total_samples = node.samples_taken;
  bundle.report.total_transmissions = node.transmissions;
  bundle.report.tx_reduction_ratio =
      node.samples_taken == 0
          ? 0.0
          : 1.0 - static_cast<double>(node.transmissions) /
                      static_cast<double>(node.samples_taken);
  return bundle;
}

EmbeddedStack start_embedded_stack(const ScenarioConfig& config,
                                   const std::filesystem::path& data_dir) {
  EmbeddedStack stack;
  std::string weather_url;
  if (config.any_relevance()) {
    stack.weather = std::make_unique<weather::StubWeatherServer>(
        weather::FixtureSet::load(config.weather_fixtures_dir));
    weather_url = stack.weather->base_url();
  }
  dash::DashboardConfig dc;
  dc.port = 0;
  dc.data_dir = data_dir;
  dc.weather_base_url = weather_url;
  stack.dashboard = std::make_unique<dash::DashboardService>(dc);
  stack.dashboard->start();
  return stack;
}

}  // namespace wsn::sim
