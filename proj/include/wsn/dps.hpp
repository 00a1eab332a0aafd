#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsn/arima.hpp"
#include "wsn/series.hpp"

namespace wsn::dps {

enum class Phase { initializing, predicting };

const char* phase_name(Phase p);

std::vector<arima::ArimaOrder> default_order_grid();

struct DpsConfig {
  double threshold_epsilon = 0.5;
  std::int64_t init_phase_ticks = 60;
  std::int64_t refresh_interval_ticks = 120;
  std::int64_t refit_window_ticks = 240;
  std::vector<arima::ArimaOrder> order_grid = default_order_grid();
  arima::FitConfig fit;

  // Throws ValidationError; in particular the init phase must be long
  // enough to fit every candidate order.
  void validate() const;
};

// Whole fitted model shipped from the sink to a node. origin_tick is the
// tick of the last value both parties had agreed on when the model was
// fitted; negative means unspecified (manually injected update).
struct ModelUpdateMsg {
  arima::ArimaModel model;
  std::int64_t origin_tick = -1;
};

struct NodeDecision {
  bool transmitted = false;
  std::optional<double> value_sent;
  double local_value = 0.0;
};

// Node half: suppresses transmissions whose forecast is within threshold.
// shared_history is the sequence both parties agree on; it gets the raw
// measurement at transmitted ticks and the forecast at suppressed ticks.
struct DpsNodeState {
  std::optional<arima::ArimaModel> model;
  Series shared_history;
  Phase phase = Phase::initializing;
  std::int64_t tick = 0;
};

// Sink half: reconstructs the series and schedules model refreshes.
struct DpsSinkState {
  std::optional<arima::ArimaModel> model;
  Series reconstruction;
  Phase phase = Phase::initializing;
  std::int64_t tick = 0;
  std::int64_t pending_refresh_at = 0;
};

DpsNodeState make_node_state(std::int64_t start_tick = 0,
                             std::int64_t tick_seconds = 1);
DpsSinkState make_sink_state(const DpsConfig& config,
                             std::int64_t start_tick = 0,
                             std::int64_t tick_seconds = 1);

// Advances the node by one sampled measurement. Total over finite inputs.
NodeDecision node_step(DpsNodeState& state, double measurement,
                       const DpsConfig& config);

// Advances the sink by one tick; `received` must be present exactly when
// the node transmitted. Returns the reconstructed value. Throws DesyncError
// when a received value contradicts the suppression rule (the node would
// have suppressed it), which can only mean the two sides diverged.
double sink_step(DpsSinkState& state, std::optional<double> received,
                 const DpsConfig& config);

struct RefreshResult {
  std::optional<ModelUpdateMsg> message;
  std::string diagnostic;  // non-empty when a scheduled fit failed
};

// Emits a freshly fitted model at the end of the initialization phase and
// every refresh_interval_ticks thereafter. On fit failure the old model is
// kept, nothing is emitted and the failure is reported in `diagnostic`.
// The sink itself adopts the emitted model via apply_model_update_sink once
// the command has been handed to the transport, so that both parties swap
// models at the same tick boundary.
RefreshResult maybe_refresh_model(DpsSinkState& state, const DpsConfig& config);

// Node-side model adoption. Returns false (old model retained) when the
// message carries an invalid model. Throws DesyncError when origin_tick is
// specified and does not match the node's history.
bool apply_model_update(DpsNodeState& state, const ModelUpdateMsg& msg);

// Sink-side counterpart; same validation rules.
bool apply_model_update_sink(DpsSinkState& state, const ModelUpdateMsg& msg);

// Lockstep co-simulation of both halves over a raw trace, with the reliable
// in-order transport collapsed to a function call. This is the offline
// `replay` engine and the reference oracle for the end-to-end simulator.
struct CosimRow {
  std::int64_t tick = 0;
  double truth = 0.0;
  bool transmitted = false;
  double stored = 0.0;     // value appended to the shared history
  double abs_error = 0.0;  // |truth - stored|
  Phase phase = Phase::initializing;
};

struct CosimResult {
  std::vector<CosimRow> rows;
  std::int64_t transmissions = 0;
  std::int64_t suppressions = 0;
  std::int64_t model_updates = 0;
  std::vector<std::int64_t> refresh_ticks;  // tick after which each swap landed
  double max_reconstruction_error = 0.0;
  std::vector<std::string> diagnostics;
  DpsNodeState node;
  DpsSinkState sink;

  // Suppression ratio over predicting-phase ticks only.
  double suppression_ratio() const;
};

CosimResult run_cosim(std::span<const double> trace, const DpsConfig& config);

}  // namespace wsn::dps
