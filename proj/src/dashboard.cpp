#include "wsn/dashboard.hpp"

#include <httplib.h>

#include <cmath>
#include <iostream>
#include <thread>

#include "wsn/error.hpp"
#include "wsn/time_util.hpp"

namespace wsn::dash {

const char* command_state_name(CommandState s) {
  switch (s) {
    case CommandState::queued: return "queued";
    case CommandState::picked_up: return "picked_up";
    case CommandState::applied: return "applied";
    case CommandState::failed: return "failed";
  }
  return "queued";
}

struct DashboardService::SensorActor {
  SensorRegistration reg;
  std::mutex mutex;

  // DPS sink runtime (registration carried a dps config)
  std::optional<dps::DpsSinkState> sink;
  dps::DpsConfig dps_config;

  // rule runtime
  std::int64_t next_schedule_eval = 0;
  std::int64_t next_relevance_eval = 0;
  rules::HysteresisTracker hysteresis{2};
  bool substitution_on = false;
  std::int64_t last_commanded_interval = 0;
  std::int64_t current_interval = 0;
  std::int64_t last_fill_wallclock = 0;
};

struct DashboardService::Impl {
  httplib::Server server;
  std::thread thread;
};

namespace {

int status_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return 400;
  if (dynamic_cast<const NotFoundError*>(&e)) return 404;
  if (dynamic_cast<const DesyncError*>(&e)) return 409;
  if (dynamic_cast<const TransportError*>(&e)) return 502;
  return 500;
}

void respond_json(httplib::Response& res, const Json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    Json j;
    j["error"] = e.what();
    respond_json(res, j, status_for(e));
  }
}

std::int64_t param_i64(const httplib::Request& req, const std::string& name,
                       std::int64_t fallback) {
  if (!req.has_param(name)) return fallback;
  try {
    return std::stoll(req.get_param_value(name));
  } catch (const std::exception&) {
    throw ValidationError("bad integer parameter '" + name + "'");
  }
}

}  // namespace

DashboardService::DashboardService(DashboardConfig config)
    : config_(std::move(config)),
      store_(config_.data_dir),
      events_(config_.event_queue_capacity),
      impl_(std::make_unique<Impl>()) {
  if (!config_.weather_base_url.empty()) {
    weather_.emplace(config_.weather_base_url);
  }
  install_routes();
}

DashboardService::~DashboardService() { stop(); }

std::string DashboardService::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

void DashboardService::start() {
  if (config_.port == 0) {
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw TransportError("dashboard: cannot bind any port");
  } else {
    if (!impl_->server.bind_to_port("0.0.0.0", config_.port)) {
      throw TransportError("dashboard: cannot bind port " +
                           std::to_string(config_.port));
    }
    port_ = config_.port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void DashboardService::stop() {
  if (impl_ && impl_->server.is_running()) {
    impl_->server.stop();
  }
  if (impl_ && impl_->thread.joinable()) impl_->thread.join();
  events_.stop();
}

DashboardService::SensorActor* DashboardService::find_actor(
    const std::string& sensor_id) {
  std::lock_guard lock(registry_mutex_);
  const auto it = actors_.find(sensor_id);
  return it == actors_.end() ? nullptr : it->second.get();
}

std::int64_t DashboardService::queue_command(const ReconfigCommand& cmd,
                                             const std::string& gateway_id) {
  std::int64_t id;
  {
    std::lock_guard lock(commands_mutex_);
    id = next_command_id_++;
    commands_.push_back(PendingCommand{id, cmd, gateway_id,
                                       CommandState::queued, {}});
  }
  Json body = to_json(cmd);
  body["command_id"] = id;
  events_.publish("reconfiguration", body);
  return id;
}

void DashboardService::apply_command_to_sink(SensorActor& actor,
                                             const ReconfigCommand& cmd) {
  std::lock_guard lock(actor.mutex);
  if (cmd.set_interval_seconds) {
    actor.current_interval = *cmd.set_interval_seconds;
  }
  if (actor.sink) {
    if (cmd.threshold_epsilon) {
      actor.dps_config.threshold_epsilon = *cmd.threshold_epsilon;
    }
    if (cmd.model_update) {
      dps::apply_model_update_sink(*actor.sink, *cmd.model_update);
    }
  }
}

void DashboardService::handle_after_sample(SensorActor& actor,
                                           std::int64_t wallclock) {
  dps_refresh_check(actor);
  rules_time_advance(actor, wallclock);
}

void DashboardService::dps_refresh_check(SensorActor& actor) {
  if (!actor.sink) return;
  dps::RefreshResult refresh =
      dps::maybe_refresh_model(*actor.sink, actor.dps_config);
  if (refresh.message) {
    ReconfigCommand cmd;
    cmd.target_sensor_id = actor.reg.sensor_id;
    cmd.model_update = std::move(refresh.message);
    queue_command(cmd, actor.reg.gateway_id);
  }
  if (!refresh.diagnostic.empty()) {
    Json body;
    body["kind"] = "model_refresh_failed";
    body["sensor_id"] = actor.reg.sensor_id;
    body["detail"] = refresh.diagnostic;
    events_.publish("analysis", body);
    std::cerr << "[dashboard] " << actor.reg.sensor_id << ": "
              << refresh.diagnostic << "\n";
  }
}

void DashboardService::rules_time_advance(SensorActor& actor,
                                          std::int64_t wallclock) {
  if (actor.reg.schedule_rule) {
    const auto& rule = *actor.reg.schedule_rule;
    while (wallclock >= actor.next_schedule_eval) {
      const std::int64_t boundary = actor.next_schedule_eval;
      actor.next_schedule_eval += rule.evaluation_period_seconds;
      const int interval = rules::evaluate_schedule(rule, boundary);
      if (interval != actor.last_commanded_interval) {
        ReconfigCommand cmd;
        cmd.target_sensor_id = actor.reg.sensor_id;
        cmd.set_interval_seconds = interval;
        queue_command(cmd, actor.reg.gateway_id);
        actor.last_commanded_interval = interval;
      }
    }
  }
  if (actor.reg.relevance) {
    while (wallclock >= actor.next_relevance_eval) {
      const std::int64_t boundary = actor.next_relevance_eval;
      actor.next_relevance_eval +=
          actor.reg.relevance->policy.evaluation_period_seconds;
      run_relevance_evaluation(actor, boundary);
    }
  }
}

void DashboardService::run_relevance_evaluation(SensorActor& actor,
                                                std::int64_t boundary) {
  const auto& conf = *actor.reg.relevance;
  const auto& policy = conf.policy;

  bool agrees = false;
  Json analysis;
  analysis["sensor_id"] = actor.reg.sensor_id;
  analysis["wallclock"] = format_iso8601_utc(boundary);
  try {
    if (!weather_) {
      throw TransportError("no weather service configured");
    }
    const auto sensed = store_.tail(actor.reg.sensor_id, Provenance::sensed,
                                    static_cast<std::size_t>(
                                        policy.comparison_window_ticks));
    if (sensed.empty()) {
      analysis["kind"] = "relevance_skipped";
      analysis["detail"] = "no sensed data yet";
      events_.publish("analysis", analysis);
      return;
    }
    Series node_window;
    node_window.start_tick = sensed.front().measurement.wallclock;
    node_window.tick_seconds =
        sensed.size() >= 2 ? std::max<std::int64_t>(
                                 1, sensed[1].measurement.wallclock -
                                        sensed[0].measurement.wallclock)
                           : std::max<std::int64_t>(1, actor.current_interval);
    for (const auto& sm : sensed) {
      node_window.values.push_back(sm.measurement.value);
    }

    const std::int64_t span_start = sensed.front().measurement.wallclock;
    const std::int64_t span_end = sensed.back().measurement.wallclock;
    const int hours = static_cast<int>((span_end - span_start) / 3600 + 1);
    const auto fc =
        weather_->fetch_forecast(conf.location, hours, span_start - 1);
    Series reference;
    reference.start_tick = fc.values.front().first;
    reference.tick_seconds =
        fc.values.size() >= 2
            ? std::max<std::int64_t>(1, fc.values[1].first - fc.values[0].first)
            : 3600;
    for (const auto& [ts, v] : fc.values) reference.values.push_back(v);

    const rules::RelevanceVerdict verdict =
        rules::assess_relevance(node_window, reference, policy);
    agrees = verdict.agrees;
    analysis["kind"] = "relevance_verdict";
    analysis["agrees"] = verdict.agrees;
    analysis["mean_abs_deviation"] = verdict.mean_abs_deviation;
    analysis["window_ticks_compared"] = verdict.window_ticks_compared;
  } catch (const TransportError& e) {
    agrees = false;
    analysis["kind"] = "relevance_transport_error";
    analysis["detail"] = e.what();
    analysis["forced"] = "disagree";
  } catch (const NotFoundError& e) {
    agrees = false;
    analysis["kind"] = "relevance_reference_missing";
    analysis["detail"] = e.what();
    analysis["forced"] = "disagree";
  } catch (const AlignmentError& e) {
    analysis["kind"] = "relevance_skipped";
    analysis["detail"] = e.what();
    events_.publish("analysis", analysis);
    return;
  }
  events_.publish("analysis", analysis);

  const std::optional<bool> flip = actor.hysteresis.update(agrees);
  if (flip) {
    rules::RelevanceVerdict committed;
    committed.agrees = *flip;
    ReconfigCommand cmd = rules::decide_reconfiguration(committed, policy);
    cmd.target_sensor_id = actor.reg.sensor_id;
    queue_command(cmd, actor.reg.gateway_id);
    actor.last_commanded_interval = *cmd.set_interval_seconds;
    actor.substitution_on = *flip;
    if (actor.substitution_on) {
      actor.last_fill_wallclock = boundary;
    }
  }
  if (actor.substitution_on) {
    fill_from_weather(actor, boundary);
  }
}

void DashboardService::fill_from_weather(SensorActor& actor,
                                         std::int64_t up_to) {
  // Fills strictly before `up_to`: a node may transmit a real sample at the
  // boundary second itself, and the sensed point owns that tick.
  const std::int64_t from = actor.last_fill_wallclock;
  if (up_to - 1 <= from || !weather_) return;
  const auto& conf = *actor.reg.relevance;
  const int hours = static_cast<int>((up_to - from + 3599) / 3600);
  weather::WeatherForecastSeries fc;
  try {
    fc = weather_->fetch_forecast(conf.location, std::max(1, hours), from);
  } catch (const Error& e) {
    Json body;
    body["kind"] = "weather_fill_failed";
    body["sensor_id"] = actor.reg.sensor_id;
    body["detail"] = e.what();
    events_.publish("analysis", body);
    return;
  }
  for (const auto& [ts, value] : fc.values) {
    if (ts >= up_to) break;
    const std::int64_t tick = ts - actor.reg.start_wallclock;
    if (tick < 0 || store_.has_tick(actor.reg.sensor_id, tick)) continue;
    Measurement m;
    m.sensor_id = actor.reg.sensor_id;
    m.tick = tick;
    m.wallclock = ts;
    m.value = value;
    m.unit = actor.reg.unit;
    m.provenance = Provenance::weather_forecast;
    const auto r = store_.append(m);
    if (r.stored) {
      Json body = to_json(m);
      body["seq"] = r.seq;
      events_.publish("measurement", body);
    }
  }
  actor.last_fill_wallclock = up_to - 1;
}

void DashboardService::install_routes() {
  auto& server = impl_->server;

  server.Post("/measurements", [this](const httplib::Request& req,
                                      httplib::Response& res) {
    guarded(res, [&] {
      const Measurement m =
          measurement_from_json(parse_json(req.body, "ingest"));
      SensorActor* actor = find_actor(m.sensor_id);
      std::unique_lock<std::mutex> actor_lock;
      if (actor) actor_lock = std::unique_lock(actor->mutex);

      if (store_.has_tick(m.sensor_id, m.tick)) {
        conflicts_.fetch_add(1);
        Json j;
        j["error"] = "duplicate (sensor_id, tick)";
        respond_json(res, j, 409);
        return;
      }
      // The DPS sink steps first so that a desync aborts the request before
      // anything is stored.
      if (actor && actor->sink) {
        dps::sink_step(*actor->sink, m.value, actor->dps_config);
      }
      const auto r = store_.append(m);
      ingested_.fetch_add(1);
      Json body = to_json(m);
      body["seq"] = r.seq;
      events_.publish("measurement", body);

      if (actor) handle_after_sample(*actor, m.wallclock);

      Json j;
      j["status"] = "ok";
      j["seq"] = r.seq;
      respond_json(res, j);
    });
  });

  server.Post("/sim/tick", [this](const httplib::Request& req,
                                  httplib::Response& res) {
    guarded(res, [&] {
      const Json j = parse_json(req.body, "sim tick");
      const std::string sensor_id = j.at("sensor_id").get<std::string>();
      const std::int64_t tick = j.at("tick").get<std::int64_t>();
      const std::int64_t wallclock =
          j.at("wallclock").is_string()
              ? parse_iso8601_utc(j.at("wallclock").get<std::string>())
              : j.at("wallclock").get<std::int64_t>();

      SensorActor* actor = find_actor(sensor_id);
      if (!actor) throw NotFoundError("unknown sensor: " + sensor_id);
      std::lock_guard lock(actor->mutex);
      if (!actor->sink) {
        throw ValidationError("sensor " + sensor_id +
                              " has no dual prediction state");
      }
      const double value =
          dps::sink_step(*actor->sink, std::nullopt, actor->dps_config);

      Measurement m;
      m.sensor_id = sensor_id;
      m.tick = tick;
      m.wallclock = wallclock;
      m.value = value;
      m.unit = actor->reg.unit;
      m.provenance = Provenance::dps_reconstructed;
      const auto r = store_.append(m);
      if (r.stored) {
        Json body = to_json(m);
        body["seq"] = r.seq;
        events_.publish("measurement", body);
      }
      handle_after_sample(*actor, wallclock);

      Json out;
      out["status"] = "ok";
      out["value"] = value;
      respond_json(res, out);
    });
  });

  server.Post("/sim/clock", [this](const httplib::Request& req,
                                   httplib::Response& res) {
    guarded(res, [&] {
      const Json j = parse_json(req.body, "sim clock");
      const std::int64_t wallclock =
          j.at("wallclock").is_string()
              ? parse_iso8601_utc(j.at("wallclock").get<std::string>())
              : j.at("wallclock").get<std::int64_t>();
      std::vector<SensorActor*> actors;
      {
        std::lock_guard lock(registry_mutex_);
        for (auto& [_, actor] : actors_) actors.push_back(actor.get());
      }
      for (SensorActor* actor : actors) {
        std::lock_guard lock(actor->mutex);
        rules_time_advance(*actor, wallclock);
      }
      Json out;
      out["status"] = "ok";
      respond_json(res, out);
    });
  });

  server.Post("/sensors", [this](const httplib::Request& req,
                                 httplib::Response& res) {
    guarded(res, [&] {
      const Json j = parse_json(req.body, "sensor registration");
      auto actor = std::make_unique<SensorActor>();
      actor->reg.sensor_id = j.at("sensor_id").get<std::string>();
      actor->reg.gateway_id = j.value("gateway_id", std::string{"gw"});
      actor->reg.unit = j.value("unit", std::string{"C"});
      actor->reg.initial_interval_seconds =
          j.value("initial_interval_seconds", std::int64_t{60});
      actor->reg.start_wallclock =
          j.contains("start_wallclock") && j.at("start_wallclock").is_string()
              ? parse_iso8601_utc(j.at("start_wallclock").get<std::string>())
              : j.value("start_wallclock", std::int64_t{0});
      if (j.contains("dps") && !j.at("dps").is_null()) {
        actor->dps_config = dps_config_from_json(j.at("dps"));
        actor->reg.dps = actor->dps_config;
        actor->sink = dps::make_sink_state(
            actor->dps_config, 0, actor->reg.initial_interval_seconds);
      }
      if (j.contains("schedule_rule") && !j.at("schedule_rule").is_null()) {
        actor->reg.schedule_rule =
            schedule_rule_from_json(j.at("schedule_rule"));
      }
      if (j.contains("relevance") && !j.at("relevance").is_null()) {
        RelevanceRuleConfig conf;
        conf.policy = relevance_policy_from_json(j.at("relevance"));
        conf.location = j.at("relevance").at("location").get<std::string>();
        if (!weather_) {
          throw ValidationError(
              "sensor has a relevance rule but the dashboard has no weather "
              "service configured");
        }
        actor->reg.relevance = std::move(conf);
      }
      actor->current_interval = actor->reg.initial_interval_seconds;
      actor->last_commanded_interval = actor->reg.initial_interval_seconds;
      actor->next_schedule_eval = actor->reg.start_wallclock;
      if (actor->reg.relevance) {
        actor->next_relevance_eval =
            actor->reg.start_wallclock +
            actor->reg.relevance->policy.evaluation_period_seconds;
      }

      std::lock_guard lock(registry_mutex_);
      actors_[actor->reg.sensor_id] = std::move(actor);
      Json out;
      out["status"] = "ok";
      respond_json(res, out);
    });
  });

  server.Post("/listeners", [this](const httplib::Request& req,
                                   httplib::Response& res) {
    guarded(res, [&] {
      const Json j = parse_json(req.body, "listener registration");
      Subscription sub;
      sub.listener_id = j.value("listener_id", std::string{});
      sub.host = j.value("host", std::string{});
      sub.port = j.value("port", 0);
      for (const auto& t : j.value("topics", Json::array())) {
        sub.topics.insert(t.get<std::string>());
      }
      const std::string id = events_.register_listener(sub);
      Json out;
      out["subscription_id"] = id;
      respond_json(res, out);
    });
  });

  server.Post("/reconfig", [this](const httplib::Request& req,
                                  httplib::Response& res) {
    guarded(res, [&] {
      const ReconfigCommand cmd =
          reconfig_from_json(parse_json(req.body, "reconfig"));
      if (!cmd.has_any_field()) {
        throw ValidationError("reconfig: no fields set");
      }
      SensorActor* actor = find_actor(cmd.target_sensor_id);
      if (!actor) {
        throw NotFoundError("unknown target sensor: " + cmd.target_sensor_id);
      }
      const std::int64_t id = queue_command(cmd, actor->reg.gateway_id);
      Json out;
      out["command_id"] = id;
      out["delivery"] = "queued";
      respond_json(res, out);
    });
  });

  server.Get("/reconfig/pending", [this](const httplib::Request& req,
                                         httplib::Response& res) {
    guarded(res, [&] {
      const std::string gateway = req.get_param_value("gateway");
      std::vector<PendingCommand> picked;
      {
        std::lock_guard lock(commands_mutex_);
        for (auto& pc : commands_) {
          if (pc.state == CommandState::queued && pc.gateway_id == gateway) {
            pc.state = CommandState::picked_up;
            picked.push_back(pc);
          }
        }
      }
      // Sink-side halves of DPS-relevant commands switch at pickup, the same
      // inter-tick boundary at which the gateway delivers to the node.
      Json arr = Json::array();
      for (const auto& pc : picked) {
        if (SensorActor* actor = find_actor(pc.command.target_sensor_id)) {
          apply_command_to_sink(*actor, pc.command);
        }
        Json cj = to_json(pc.command);
        cj["command_id"] = pc.command_id;
        arr.push_back(std::move(cj));
      }
      Json out;
      out["commands"] = std::move(arr);
      respond_json(res, out);
    });
  });

  server.Post("/reconfig/ack", [this](const httplib::Request& req,
                                      httplib::Response& res) {
    guarded(res, [&] {
      const Json j = parse_json(req.body, "reconfig ack");
      const std::int64_t id = j.at("command_id").get<std::int64_t>();
      const bool applied = j.value("applied", true);
      std::lock_guard lock(commands_mutex_);
      for (auto& pc : commands_) {
        if (pc.command_id == id) {
          pc.state = applied ? CommandState::applied : CommandState::failed;
          pc.detail = j.value("detail", std::string{});
          Json out;
          out["status"] = "ok";
          respond_json(res, out);
          return;
        }
      }
      throw NotFoundError("unknown command id " + std::to_string(id));
    });
  });

  server.Get("/reconfig/status", [this](const httplib::Request& req,
                                        httplib::Response& res) {
    guarded(res, [&] {
      const std::int64_t id = param_i64(req, "id", -1);
      std::lock_guard lock(commands_mutex_);
      for (const auto& pc : commands_) {
        if (pc.command_id == id) {
          Json out;
          out["command_id"] = id;
          out["state"] = command_state_name(pc.state);
          out["detail"] = pc.detail;
          respond_json(res, out);
          return;
        }
      }
      throw NotFoundError("unknown command id " + std::to_string(id));
    });
  });

  server.Get("/series", [this](const httplib::Request& req,
                               httplib::Response& res) {
    guarded(res, [&] {
      const std::string sensor = req.get_param_value("sensor");
      const std::int64_t from = param_i64(req, "from", 0);
      const std::int64_t to =
          param_i64(req, "to", std::numeric_limits<std::int64_t>::max());
      if (from > to) throw ValidationError("series: from > to");
      Json points = Json::array();
      for (const auto& sm : store_.query(sensor, from, to)) {
        Json p = to_json(sm.measurement);
        p["seq"] = sm.seq;
        points.push_back(std::move(p));
      }
      Json out;
      out["sensor_id"] = sensor;
      out["points"] = std::move(points);
      respond_json(res, out);
    });
  });

  server.Post("/failures", [this](const httplib::Request& req,
                                  httplib::Response& res) {
    guarded(res, [&] {
      const Json j = parse_json(req.body, "failure report");
      const std::string sensor = j.at("sensor_id").get<std::string>();
      const std::string description = j.value("description", std::string{});
      const std::int64_t wallclock =
          j.contains("wallclock") && j.at("wallclock").is_string()
              ? parse_iso8601_utc(j.at("wallclock").get<std::string>())
              : j.value("wallclock", std::int64_t{0});
      const std::int64_t seq =
          store_.record_failure(sensor, description, wallclock);
      Json body;
      body["sensor_id"] = sensor;
      body["description"] = description;
      body["wallclock"] = format_iso8601_utc(wallclock);
      body["seq"] = seq;
      events_.publish("failure", body);
      Json out;
      out["status"] = "ok";
      out["seq"] = seq;
      respond_json(res, out);
    });
  });

  server.Get("/failures", [this](const httplib::Request& req,
                                 httplib::Response& res) {
    guarded(res, [&] {
      const std::string sensor = req.get_param_value("sensor");
      Json arr = Json::array();
      for (const auto& f : store_.failures(sensor)) {
        Json j;
        j["seq"] = f.seq;
        j["sensor_id"] = f.sensor_id;
        j["description"] = f.description;
        j["wallclock"] = format_iso8601_utc(f.wallclock);
        arr.push_back(std::move(j));
      }
      Json out;
      out["failures"] = std::move(arr);
      respond_json(res, out);
    });
  });

  server.Get("/metrics", [this](const httplib::Request&,
                                httplib::Response& res) {
    guarded(res, [&] {
      const MetricsSnapshot m = metrics();
      Json j;
      j["ingested"] = m.ingested;
      j["conflicts"] = m.conflicts;
      j["stored_total"] = m.stored_total;
      j["stored_sensed"] = m.stored_sensed;
      j["stored_dps_reconstructed"] = m.stored_dps_reconstructed;
      j["stored_weather_forecast"] = m.stored_weather_forecast;
      j["events_delivered"] = m.events_delivered;
      j["events_dropped"] = m.events_dropped;
      j["listeners"] = m.listeners;
      j["sensors"] = m.sensors;
      j["commands_queued"] = m.commands_queued;
      j["commands_picked_up"] = m.commands_picked_up;
      j["commands_applied"] = m.commands_applied;
      j["commands_failed"] = m.commands_failed;
      respond_json(res, j);
    });
  });

  server.Get("/sensors", [this](const httplib::Request&,
                                httplib::Response& res) {
    guarded(res, [&] {
      Json arr = Json::array();
      std::lock_guard lock(registry_mutex_);
      for (const auto& [id, actor] : actors_) {
        Json j;
        j["sensor_id"] = id;
        j["gateway_id"] = actor->reg.gateway_id;
        j["dps"] = actor->sink.has_value();
        if (actor->sink) {
          j["dps_phase"] = dps::phase_name(actor->sink->phase);
          j["dps_tick"] = actor->sink->tick;
        }
        j["schedule_rule"] = actor->reg.schedule_rule
                                 ? to_json(*actor->reg.schedule_rule)
                                 : Json(nullptr);
        j["substitution_on"] = actor->substitution_on;
        arr.push_back(std::move(j));
      }
      Json out;
      out["sensors"] = std::move(arr);
      respond_json(res, out);
    });
  });
}

MetricsSnapshot DashboardService::metrics() const {
  MetricsSnapshot m;
  m.ingested = ingested_.load();
  m.conflicts = conflicts_.load();
  m.stored_total = store_.total_measurements();
  m.stored_sensed = store_.count_by_provenance(Provenance::sensed);
  m.stored_dps_reconstructed =
      store_.count_by_provenance(Provenance::dps_reconstructed);
  m.stored_weather_forecast =
      store_.count_by_provenance(Provenance::weather_forecast);
  const auto counters = events_.counters();
  m.events_delivered = counters.delivered;
  m.events_dropped = counters.dropped;
  m.listeners = static_cast<std::int64_t>(events_.listener_count());
  {
    std::lock_guard lock(registry_mutex_);
    m.sensors = static_cast<std::int64_t>(actors_.size());
  }
  {
    std::lock_guard lock(commands_mutex_);
    for (const auto& pc : commands_) {
      switch (pc.state) {
        case CommandState::queued: ++m.commands_queued; break;
        case CommandState::picked_up: ++m.commands_picked_up; break;
        case CommandState::applied: ++m.commands_applied; break;
        case CommandState::failed: ++m.commands_failed; break;
      }
    }
  }
  return m;
}

}  // namespace wsn::dash
