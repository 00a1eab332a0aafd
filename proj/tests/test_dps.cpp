#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "wsn/dps.hpp"
#include "wsn/error.hpp"

using namespace wsn::dps;
using wsn::arima::ArimaModel;

namespace {

ArimaModel random_walk_model() {
  ArimaModel m;
  m.order = {0, 1, 0};
  return m;
}

DpsNodeState predicting_node(double last_value) {
  DpsNodeState node = make_node_state();
  node.model = random_walk_model();
  node.phase = Phase::predicting;
  node.shared_history.values = {last_value};
  node.tick = 1;
  return node;
}

std::vector<double> sine_trace(std::uint64_t seed, std::size_t n,
                               double noise_std,
                               double interval_seconds = 60.0) {
  wsn::GaussianSampler rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * interval_seconds;
    out.push_back(20.0 + 4.0 * std::sin(2.0 * std::numbers::pi * t / 86400.0) +
                  rng.next(0.0, noise_std));
  }
  return out;
}

DpsConfig small_config() {
  DpsConfig cfg;
  cfg.init_phase_ticks = 40;
  cfg.refresh_interval_ticks = 50;
  cfg.refit_window_ticks = 40;
  cfg.order_grid = {{1, 0, 0}};
  return cfg;
}

}  // namespace

TEST_CASE("node suppresses a measurement inside the threshold") {
  DpsConfig cfg;
  DpsNodeState node = predicting_node(20.0);
  const NodeDecision d = node_step(node, 20.3, cfg);
  CHECK(!d.transmitted);
  CHECK(!d.value_sent.has_value());
  CHECK(node.shared_history.values.back() == 20.0);
  CHECK(node.tick == 2);
}

TEST_CASE("node transmits a measurement outside the threshold") {
  DpsConfig cfg;
  DpsNodeState node = predicting_node(20.0);
  const NodeDecision d = node_step(node, 21.0, cfg);
  CHECK(d.transmitted);
  CHECK(d.value_sent == 21.0);
  CHECK(node.shared_history.values.back() == 21.0);
}

TEST_CASE("infinite threshold never transmits in the predicting phase") {
  DpsConfig cfg = small_config();
  cfg.threshold_epsilon = std::numeric_limits<double>::infinity();
  const std::vector<double> trace = sine_trace(5, 140, 0.5);
  const CosimResult r = run_cosim(trace, cfg);
  std::int64_t predicting_tx = 0;
  for (const auto& row : r.rows) {
    if (row.phase == Phase::predicting && row.transmitted) ++predicting_tx;
  }
  CHECK(predicting_tx == 0);
  CHECK(r.rows.size() == 140);
}

TEST_CASE("sink mirrors suppression with its own forecast") {
  DpsConfig cfg;
  DpsSinkState sink = make_sink_state(cfg);
  sink.model = random_walk_model();
  sink.phase = Phase::predicting;
  sink.reconstruction.values = {20.0};
  sink.tick = 1;

  CHECK(sink_step(sink, std::nullopt, cfg) == 20.0);
  CHECK(sink.reconstruction.values.back() == 20.0);

  CHECK(sink_step(sink, 21.0, cfg) == 21.0);
  CHECK(sink.reconstruction.values.back() == 21.0);
}

TEST_CASE("sink raises a desync error for a value the node should have suppressed") {
  DpsConfig cfg;
  DpsSinkState sink = make_sink_state(cfg);
  sink.model = random_walk_model();
  sink.phase = Phase::predicting;
  sink.reconstruction.values = {20.0};
  sink.tick = 1;
  CHECK_THROWS_AS(sink_step(sink, 20.3, cfg), wsn::DesyncError);
}

TEST_CASE("sink raises a desync error when suppression happens before any model") {
  DpsConfig cfg;
  DpsSinkState sink = make_sink_state(cfg);
  CHECK_THROWS_AS(sink_step(sink, std::nullopt, cfg), wsn::DesyncError);
}

TEST_CASE("co-simulation keeps node and sink bit-identical with bounded error") {
  DpsConfig cfg;  // defaults: init 60, refresh 120 -> several mid-run swaps
  const std::vector<double> trace = sine_trace(42, 500, 0.1);
  const CosimResult r = run_cosim(trace, cfg);

  REQUIRE(r.node.shared_history.values.size() ==
          r.sink.reconstruction.values.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.node.shared_history.values[i] == r.sink.reconstruction.values[i]);
    const CosimRow& row = r.rows[i];
    if (row.transmitted) {
      CHECK(row.abs_error == 0.0);
    } else {
      CHECK(row.abs_error <= cfg.threshold_epsilon);
    }
  }
  CHECK(r.model_updates >= 2);
  CHECK(r.transmissions + r.suppressions ==
        static_cast<std::int64_t>(trace.size()));
}

TEST_CASE("model refresh follows the configured schedule") {
  DpsConfig cfg = small_config();
  const std::vector<double> trace = sine_trace(9, 40, 0.2);

  DpsSinkState sink = make_sink_state(cfg);
  for (double v : trace) sink_step(sink, v, cfg);
  CHECK(sink.tick == 40);

  RefreshResult initial = maybe_refresh_model(sink, cfg);
  REQUIRE(initial.message.has_value());
  CHECK(initial.message->origin_tick == 39);
  CHECK(apply_model_update_sink(sink, *initial.message));
  CHECK(sink.phase == Phase::predicting);

  // Ticks 41..89: nothing due; tick 90 = 40 + 50 is the first refresh.
  for (int i = 0; i < 49; ++i) {
    sink_step(sink, std::nullopt, cfg);
    RefreshResult r = maybe_refresh_model(sink, cfg);
    CHECK(!r.message.has_value());
  }
  sink_step(sink, std::nullopt, cfg);
  CHECK(sink.tick == 90);
  RefreshResult due = maybe_refresh_model(sink, cfg);
  CHECK(due.message.has_value());
}

TEST_CASE("a model fitted on a constant window forecasts the constant exactly") {
  DpsConfig cfg = small_config();
  cfg.order_grid = default_order_grid();
  DpsSinkState sink = make_sink_state(cfg);
  for (int i = 0; i < 40; ++i) sink_step(sink, 7.0, cfg);
  RefreshResult r = maybe_refresh_model(sink, cfg);
  REQUIRE(r.message.has_value());
  const auto f =
      wsn::arima::forecast(r.message->model, sink.reconstruction, 5);
  for (double v : f.point_values) CHECK(v == 7.0);
}

TEST_CASE("applying the same model twice leaves the node state unchanged") {
  DpsConfig cfg = small_config();
  const std::vector<double> trace = sine_trace(3, 60, 0.2);
  CosimResult r = run_cosim(trace, cfg);
  REQUIRE(r.node.model.has_value());

  ModelUpdateMsg msg;
  msg.model = *r.node.model;
  msg.origin_tick = -1;
  DpsNodeState before = r.node;
  CHECK(apply_model_update(r.node, msg));
  CHECK(r.node.model == before.model);
  CHECK(r.node.phase == before.phase);
  CHECK(r.node.shared_history.values == before.shared_history.values);
}

TEST_CASE("an invalid model update is rejected and the old model retained") {
  DpsNodeState node = predicting_node(20.0);
  const ArimaModel old_model = *node.model;

  ModelUpdateMsg bad;
  bad.model.order = {1, 0, 0};
  bad.model.ar = {1.5};  // explosive
  CHECK(!apply_model_update(node, bad));
  CHECK(node.model == old_model);
}

TEST_CASE("model update with a mismatched origin is a hard desync") {
  DpsNodeState node = predicting_node(20.0);
  ModelUpdateMsg msg;
  msg.model = random_walk_model();
  msg.origin_tick = 17;  // node history ends at tick 0
  CHECK_THROWS_AS(apply_model_update(node, msg), wsn::DesyncError);
}

TEST_CASE("after a model update both sides forecast bit-identically") {
  DpsConfig cfg;
  const std::vector<double> trace = sine_trace(8, 300, 0.1);
  const CosimResult r = run_cosim(trace, cfg);
  REQUIRE(r.node.model.has_value());
  REQUIRE(r.sink.model.has_value());
  const auto fn = wsn::arima::forecast(*r.node.model, r.node.shared_history, 20);
  const auto fs = wsn::arima::forecast(*r.sink.model, r.sink.reconstruction, 20);
  for (int i = 0; i < 20; ++i) {
    CHECK(fn.point_values[static_cast<std::size_t>(i)] ==
          fs.point_values[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("transmission count is monotone non-increasing in the threshold") {
  DpsConfig cfg = small_config();
  cfg.refresh_interval_ticks = 1000000000;  // single initial model
  const std::vector<double> trace = sine_trace(12, 400, 0.15);

  std::int64_t last_tx = -1;
  for (double eps : {0.1, 0.3, 0.7, 1.5}) {
    cfg.threshold_epsilon = eps;
    const CosimResult r = run_cosim(trace, cfg);
    if (last_tx >= 0) CHECK(r.transmissions <= last_tx);
    last_tx = r.transmissions;
  }
}

TEST_CASE("co-simulation is deterministic") {
  DpsConfig cfg;
  const std::vector<double> trace = sine_trace(99, 350, 0.1);
  const CosimResult a = run_cosim(trace, cfg);
  const CosimResult b = run_cosim(trace, cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].transmitted == b.rows[i].transmitted);
    CHECK(a.rows[i].stored == b.rows[i].stored);
  }
  CHECK(a.transmissions == b.transmissions);
}

TEST_CASE("config validation rejects an init phase shorter than the fit needs") {
  DpsConfig cfg;
  cfg.init_phase_ticks = 20;
  CHECK_THROWS_AS(cfg.validate(), wsn::ValidationError);
}
