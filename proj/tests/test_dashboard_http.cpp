#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <filesystem>

#include "wsn/dashboard.hpp"
#include "wsn/error.hpp"
#include "wsn/events.hpp"
#include "wsn/simulator.hpp"
#include "wsn/time_util.hpp"

using namespace wsn;
using wsn::sim::DashboardClient;

namespace {

std::filesystem::path fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("wsn_dash_test_" + tag + "_" +
                    std::to_string(std::chrono::steady_clock::now()
                                       .time_since_epoch()
                                       .count()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct Service {
  std::filesystem::path dir;
  std::unique_ptr<dash::DashboardService> service;
  std::unique_ptr<DashboardClient> client;

  explicit Service(const std::string& tag, std::string weather_url = {}) {
    dir = fresh_dir(tag);
    dash::DashboardConfig cfg;
    cfg.port = 0;
    cfg.data_dir = dir;
    cfg.weather_base_url = std::move(weather_url);
    service = std::make_unique<dash::DashboardService>(cfg);
    service->start();
    client = std::make_unique<DashboardClient>(service->base_url());
  }

  ~Service() {
    if (service) service->stop();
    std::filesystem::remove_all(dir);
  }
};

Json measurement_json(const std::string& sensor, std::int64_t tick,
                      double value, const std::string& provenance = "sensed") {
  Json j;
  j["sensor_id"] = sensor;
  j["tick"] = tick;
  j["wallclock"] = format_iso8601_utc(1780000000 + tick);
  j["value"] = value;
  j["unit"] = "C";
  j["provenance"] = provenance;
  return j;
}

const std::int64_t kStart = parse_iso8601_utc("2026-06-01T00:00:00Z");

Json dps_sensor_registration(const std::string& sensor) {
  Json j;
  j["sensor_id"] = sensor;
  j["gateway_id"] = "gw-t";
  j["unit"] = "C";
  j["initial_interval_seconds"] = 60;
  j["start_wallclock"] = format_iso8601_utc(kStart);
  j["dps"] = Json{{"threshold_epsilon", 0.5},
                  {"init_phase_ticks", 30},
                  {"refresh_interval_ticks", 40},
                  {"refit_window_ticks", 30},
                  {"order_grid", Json::array({Json::array({1, 0, 0})})}};
  return j;
}

}  // namespace

TEST_CASE("ingest acknowledges with a sequence number and stores the point") {
  Service s("ingest");
  const Json ack = s.client->post("/measurements", measurement_json("n1", 0, 20.5));
  CHECK(ack.at("status") == "ok");
  CHECK(ack.at("seq").get<std::int64_t>() >= 1);
  const Json series = s.client->get("/series?sensor=n1&from=0&to=10");
  REQUIRE(series.at("points").size() == 1);
  CHECK(series.at("points")[0].at("value") == 20.5);
}

TEST_CASE("duplicate ingest conflicts and is stored only once") {
  Service s("dup");
  s.client->post("/measurements", measurement_json("n1", 7, 20.5));
  CHECK_THROWS_WITH_AS(
      s.client->post("/measurements", measurement_json("n1", 7, 21.5)),
      doctest::Contains("409"), TransportError);
  const Json series = s.client->get("/series?sensor=n1&from=0&to=100");
  CHECK(series.at("points").size() == 1);
  const Json metrics = s.client->get("/metrics");
  CHECK(metrics.at("conflicts") == 1);
  CHECK(metrics.at("ingested") == 1);
}

TEST_CASE("non-finite and malformed payloads are rejected") {
  Service s("nan");
  CHECK_THROWS_WITH_AS(
      s.client->post("/measurements",
                     parse_json(R"({"sensor_id":"n1","tick":0,"wallclock":0,
                                    "value":"oops","unit":"C"})",
                                "test")),
      doctest::Contains("400"), TransportError);
  // NaN cannot travel through JSON; it arrives as a string or null and is a
  // 400 either way.
  CHECK_THROWS_WITH_AS(
      s.client->post("/measurements",
                     parse_json(R"({"sensor_id":"n1","tick":0,
                                    "wallclock":0,"value":null})",
                                "test")),
      doctest::Contains("400"), TransportError);
  const Json m = s.client->get("/metrics");
  CHECK(m.at("stored_total") == 0);
}

TEST_CASE("a registered listener receives measurement events exactly once") {
  Service s("events");
  dash::FrameReceiver receiver;
  Json reg;
  reg["listener_id"] = "t";
  reg["host"] = "127.0.0.1";
  reg["port"] = receiver.port();
  reg["topics"] = Json::array({"measurement"});
  const Json ack = s.client->post("/listeners", reg);
  CHECK(!ack.at("subscription_id").get<std::string>().empty());

  for (int i = 0; i < 4; ++i) {
    s.client->post("/measurements", measurement_json("n1", i, 20.0 + i));
  }
  REQUIRE(receiver.wait_for_frames(4));
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  const auto frames = receiver.frames();
  REQUIRE(frames.size() == 4);
  for (const auto& f : frames) {
    CHECK(f.at("topic") == "measurement");
    CHECK(f.at("body").at("sensor_id") == "n1");
  }
  receiver.stop();
}

TEST_CASE("listener registration against a dead endpoint is rejected") {
  Service s("deadlistener");
  Json reg;
  reg["listener_id"] = "t";
  reg["host"] = "127.0.0.1";
  reg["port"] = 9;  // discard port
  reg["topics"] = Json::array({"measurement"});
  CHECK_THROWS_WITH_AS(s.client->post("/listeners", reg),
                       doctest::Contains("502"), TransportError);
  CHECK(s.client->get("/metrics").at("listeners") == 0);
}

TEST_CASE("series queries honor range bounds and unknown sensors") {
  Service s("series");
  for (int t = 0; t < 10; ++t) {
    s.client->post("/measurements", measurement_json("n1", t * 10, t * 1.0));
  }
  const Json mid = s.client->get("/series?sensor=n1&from=20&to=50");
  REQUIRE(mid.at("points").size() == 4);
  CHECK(mid.at("points")[0].at("tick") == 20);
  CHECK(mid.at("points")[3].at("tick") == 50);
  CHECK(s.client->get("/series?sensor=ghost").at("points").empty());
  CHECK_THROWS_WITH_AS(s.client->get("/series?sensor=n1&from=5&to=1"),
                       doctest::Contains("400"), TransportError);
}

TEST_CASE("reconfig requires a known target and at least one field") {
  Service s("reconfig");
  s.client->post("/sensors", dps_sensor_registration("n1"));

  Json empty;
  empty["target_sensor_id"] = "n1";
  CHECK_THROWS_WITH_AS(s.client->post("/reconfig", empty),
                       doctest::Contains("400"), TransportError);

  Json unknown;
  unknown["target_sensor_id"] = "ghost";
  unknown["set_interval_seconds"] = 120;
  CHECK_THROWS_WITH_AS(s.client->post("/reconfig", unknown),
                       doctest::Contains("404"), TransportError);

  Json ok;
  ok["target_sensor_id"] = "n1";
  ok["set_interval_seconds"] = 120;
  const Json resp = s.client->post("/reconfig", ok);
  CHECK(resp.at("delivery") == "queued");
  const std::int64_t id = resp.at("command_id").get<std::int64_t>();

  const Json pending = s.client->get("/reconfig/pending?gateway=gw-t");
  REQUIRE(pending.at("commands").size() == 1);
  CHECK(pending.at("commands")[0].at("command_id") == id);
  CHECK(pending.at("commands")[0].at("set_interval_seconds") == 120);

  // A second poll returns nothing: commands are picked up exactly once.
  CHECK(s.client->get("/reconfig/pending?gateway=gw-t").at("commands").empty());

  Json ack;
  ack["command_id"] = id;
  ack["applied"] = true;
  s.client->post("/reconfig/ack", ack);
  const Json status = s.client->get("/reconfig/status?id=" + std::to_string(id));
  CHECK(status.at("state") == "applied");
}

TEST_CASE("failures are recorded, ordered and published") {
  Service s("failures");
  dash::FrameReceiver receiver;
  Json reg;
  reg["listener_id"] = "f";
  reg["host"] = "127.0.0.1";
  reg["port"] = receiver.port();
  reg["topics"] = Json::array({"failure"});
  s.client->post("/listeners", reg);

  Json f1;
  f1["sensor_id"] = "n1";
  f1["description"] = "battery low";
  f1["wallclock"] = format_iso8601_utc(kStart);
  s.client->post("/failures", f1);
  Json f2 = f1;
  f2["description"] = "battery empty";
  s.client->post("/failures", f2);

  const Json list = s.client->get("/failures?sensor=n1");
  REQUIRE(list.at("failures").size() == 2);
  CHECK(list.at("failures")[0].at("description") == "battery low");
  CHECK(list.at("failures")[1].at("description") == "battery empty");
  CHECK(list.at("failures")[0].at("seq").get<std::int64_t>() <
        list.at("failures")[1].at("seq").get<std::int64_t>());

  REQUIRE(receiver.wait_for_frames(2));
  CHECK(receiver.frames()[0].at("topic") == "failure");
  receiver.stop();
}

TEST_CASE("restart over the same data dir reproduces identical query results") {
  const auto dir = fresh_dir("restart");
  std::string first_dump;
  {
    dash::DashboardConfig cfg;
    cfg.port = 0;
    cfg.data_dir = dir;
    dash::DashboardService service(cfg);
    service.start();
    DashboardClient client(service.base_url());
    for (int t = 0; t < 30; ++t) {
      client.post("/measurements",
                  measurement_json("n1", t, 20.0 + 0.25 * t,
                                   t % 3 ? "sensed" : "dps_reconstructed"));
    }
    first_dump = client.get("/series?sensor=n1&from=0&to=100").dump();
    service.stop();
  }
  {
    dash::DashboardConfig cfg;
    cfg.port = 0;
    cfg.data_dir = dir;
    dash::DashboardService service(cfg);
    service.start();
    DashboardClient client(service.base_url());
    const std::string second_dump =
        client.get("/series?sensor=n1&from=0&to=100").dump();
    CHECK(first_dump == second_dump);
    service.stop();
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("dps sensor over http: init, model dispatch, reconstruction, desync") {
  Service s("dps");
  s.client->post("/sensors", dps_sensor_registration("n1"));

  // A suppressed tick before any model exists is a protocol desync.
  Json early;
  early["sensor_id"] = "n1";
  early["tick"] = 0;
  early["wallclock"] = format_iso8601_utc(kStart);
  CHECK_THROWS_WITH_AS(s.client->post("/sim/tick", early),
                       doctest::Contains("409"), TransportError);

  // Initialization phase: 30 transmitted samples.
  for (int i = 0; i < 30; ++i) {
    Json m;
    m["sensor_id"] = "n1";
    m["tick"] = i * 60;
    m["wallclock"] = format_iso8601_utc(kStart + i * 60);
    m["value"] = 20.0 + 0.01 * i;
    m["unit"] = "C";
    m["provenance"] = "sensed";
    s.client->post("/measurements", m);
  }

  // The initial model is fitted at the end of the init phase and queued.
  const Json pending = s.client->get("/reconfig/pending?gateway=gw-t");
  REQUIRE(pending.at("commands").size() == 1);
  const Json& cmd = pending.at("commands")[0];
  CHECK(cmd.at("target_sensor_id") == "n1");
  REQUIRE(cmd.contains("model_update"));
  CHECK(cmd.at("model_update").at("origin_tick") == 29);
  // Canonical field order of the model update message.
  const auto keys = [&] {
    std::vector<std::string> k;
    for (auto it = cmd.at("model_update").begin();
         it != cmd.at("model_update").end(); ++it) {
      k.push_back(it.key());
    }
    return k;
  }();
  CHECK(keys == std::vector<std::string>{"order", "ar_coeffs", "ma_coeffs",
                                         "intercept", "noise_variance",
                                         "origin_tick"});

  // Suppressed ticks now reconstruct server-side.
  Json tick;
  tick["sensor_id"] = "n1";
  tick["tick"] = 30 * 60;
  tick["wallclock"] = format_iso8601_utc(kStart + 30 * 60);
  const Json r = s.client->post("/sim/tick", tick);
  const double reconstructed = r.at("value").get<double>();
  CHECK(std::isfinite(reconstructed));

  const Json series = s.client->get("/series?sensor=n1&from=1800&to=1800");
  REQUIRE(series.at("points").size() == 1);
  CHECK(series.at("points")[0].at("provenance") == "dps_reconstructed");
  CHECK(series.at("points")[0].at("value").get<double>() == reconstructed);
  CHECK(s.client->get("/metrics").at("stored_dps_reconstructed") == 1);

  // A transmission the sink would have suppressed betrays a desync.
  Json bogus;
  bogus["sensor_id"] = "n1";
  bogus["tick"] = 31 * 60;
  bogus["wallclock"] = format_iso8601_utc(kStart + 31 * 60);
  bogus["value"] = reconstructed;  // within epsilon of the sink forecast
  bogus["unit"] = "C";
  bogus["provenance"] = "sensed";
  CHECK_THROWS_WITH_AS(s.client->post("/measurements", bogus),
                       doctest::Contains("409"), TransportError);
  // Nothing was stored for that tick.
  CHECK(s.client->get("/series?sensor=n1&from=1860&to=1860").at("points").empty());
}

TEST_CASE("relevance rule falls back to the eager path when weather is dead") {
  // Weather URL points at a closed port: every evaluation is a transport
  // error, which forces the disagree verdict.
  Service s("deadweather", "http://127.0.0.1:9");
  Json reg;
  reg["sensor_id"] = "n1";
  reg["gateway_id"] = "gw-t";
  reg["initial_interval_seconds"] = 300;
  reg["start_wallclock"] = format_iso8601_utc(kStart);
  reg["relevance"] = Json{{"location", "plaza"},
                          {"agreement_tolerance", 1.0},
                          {"comparison_window_ticks", 4},
                          {"relaxed_interval_seconds", 1800},
                          {"eager_interval_seconds", 60},
                          {"evaluation_period_seconds", 600}};
  s.client->post("/sensors", reg);

  Json m = measurement_json("n1", 0, 20.0);
  m["wallclock"] = format_iso8601_utc(kStart);
  s.client->post("/measurements", m);

  // Two evaluation boundaries pass: two forced disagrees commit the eager
  // interval.
  Json clock;
  clock["wallclock"] = format_iso8601_utc(kStart + 1300);
  s.client->post("/sim/clock", clock);

  const Json pending = s.client->get("/reconfig/pending?gateway=gw-t");
  REQUIRE(pending.at("commands").size() == 1);
  CHECK(pending.at("commands")[0].at("set_interval_seconds") == 60);
  CHECK(pending.at("commands")[0].at("substitute_source") == "none");
}

TEST_CASE("binding a taken port fails loudly") {
  // Two fixed-port services on the same port: the second must refuse to
  // start. Probe upward from a base port until one is free.
  const auto dir1 = fresh_dir("porttaken1");
  const auto dir2 = fresh_dir("porttaken2");
  std::unique_ptr<dash::DashboardService> first;
  int port = 18731;
  for (; port < 18800; ++port) {
    dash::DashboardConfig cfg;
    cfg.port = port;
    cfg.data_dir = dir1;
    first = std::make_unique<dash::DashboardService>(cfg);
    try {
      first->start();
      break;
    } catch (const TransportError&) {
      first.reset();
    }
  }
  REQUIRE(first != nullptr);

  dash::DashboardConfig cfg;
  cfg.port = port;
  cfg.data_dir = dir2;
  dash::DashboardService second(cfg);
  CHECK_THROWS_AS(second.start(), TransportError);
  first->stop();
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}
