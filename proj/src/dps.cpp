#include "wsn/dps.hpp"

#include <algorithm>
#include <cmath>

#include "wsn/error.hpp"

namespace wsn::dps {

const char* phase_name(Phase p) {
  return p == Phase::initializing ? "initializing" : "predicting";
}

std::vector<arima::ArimaOrder> default_order_grid() {
  return {{1, 0, 0}, {0, 1, 1}, {1, 1, 0}, {1, 1, 1}, {2, 1, 1}};
}

void DpsConfig::validate() const {
  if (!(threshold_epsilon > 0.0)) {
    throw ValidationError("dps: threshold_epsilon must be > 0");
  }
  if (init_phase_ticks <= 0 || refresh_interval_ticks <= 0 ||
      refit_window_ticks <= 0) {
    throw ValidationError("dps: phase/interval tick counts must be > 0");
  }
  if (order_grid.empty()) {
    throw ValidationError("dps: order grid must not be empty");
  }
  std::size_t needed = 0;
  for (const auto& o : order_grid) {
    needed = std::max(needed, arima::min_fit_length(o));
  }
  if (static_cast<std::size_t>(init_phase_ticks) < needed) {
    throw ValidationError(
        "dps: init_phase_ticks " + std::to_string(init_phase_ticks) +
        " shorter than the minimum fitting length " + std::to_string(needed));
  }
  if (static_cast<std::size_t>(refit_window_ticks) < needed) {
    throw ValidationError("dps: refit_window_ticks shorter than the minimum "
                          "fitting length " + std::to_string(needed));
  }
}

DpsNodeState make_node_state(std::int64_t start_tick, std::int64_t tick_seconds) {
  DpsNodeState s;
  s.shared_history.start_tick = start_tick;
  s.shared_history.tick_seconds = tick_seconds;
  return s;
}

DpsSinkState make_sink_state(const DpsConfig& config, std::int64_t start_tick,
                             std::int64_t tick_seconds) {
  DpsSinkState s;
  s.reconstruction.start_tick = start_tick;
  s.reconstruction.tick_seconds = tick_seconds;
  s.pending_refresh_at = config.init_phase_ticks;
  return s;
}

NodeDecision node_step(DpsNodeState& state, double measurement,
                       const DpsConfig& config) {
  if (!std::isfinite(measurement)) {
    throw ValidationError("dps: measurement must be finite");
  }
  NodeDecision decision;
  decision.local_value = measurement;

  if (state.phase == Phase::initializing || !state.model) {
    decision.transmitted = true;
    decision.value_sent = measurement;
    state.shared_history.values.push_back(measurement);
  } else {
    const double predicted =
        arima::forecast(*state.model, state.shared_history, 1).point_values[0];
    if (std::abs(measurement - predicted) > config.threshold_epsilon) {
      decision.transmitted = true;
      decision.value_sent = measurement;
      state.shared_history.values.push_back(measurement);
    } else {
      decision.transmitted = false;
      state.shared_history.values.push_back(predicted);
    }
  }
  state.tick += 1;
  return decision;
}

double sink_step(DpsSinkState& state, std::optional<double> received,
                 const DpsConfig& config) {
  double reconstructed;
  if (state.phase == Phase::initializing || !state.model) {
    if (!received) {
      throw DesyncError(
          "dps sink: suppressed tick before any model was delivered");
    }
    reconstructed = *received;
  } else {
    const double predicted =
        arima::forecast(*state.model, state.reconstruction, 1).point_values[0];
    if (received) {
      if (!(std::abs(*received - predicted) > config.threshold_epsilon)) {
        throw DesyncError(
            "dps sink: received a value the node should have suppressed "
            "(|" + std::to_string(*received) + " - " +
            std::to_string(predicted) + "| <= threshold); protocol desync");
      }
      reconstructed = *received;
    } else {
      reconstructed = predicted;
    }
  }
  state.reconstruction.values.push_back(reconstructed);
  state.tick += 1;
  return reconstructed;
}

RefreshResult maybe_refresh_model(DpsSinkState& state, const DpsConfig& config) {
  RefreshResult result;
  if (state.tick < state.pending_refresh_at || state.reconstruction.empty()) {
    return result;
  }
  state.pending_refresh_at += config.refresh_interval_ticks;

  const std::size_t len = state.reconstruction.size();
  const std::size_t window_len =
      std::min(len, static_cast<std::size_t>(config.refit_window_ticks));
  Series window;
  window.values.assign(state.reconstruction.values.end() -
                           static_cast<std::ptrdiff_t>(window_len),
                       state.reconstruction.values.end());
  window.start_tick = state.reconstruction.start_tick +
                      static_cast<std::int64_t>(len - window_len);
  window.tick_seconds = state.reconstruction.tick_seconds;

  try {
    const arima::ArimaOrder order =
        arima::select_order(window, config.order_grid, config.fit);
    ModelUpdateMsg msg;
    msg.model = arima::fit_arima(window, order, config.fit);
    msg.origin_tick =
        state.reconstruction.start_tick + static_cast<std::int64_t>(len) - 1;
    result.message = std::move(msg);
  } catch (const Error& e) {
    result.diagnostic = std::string("model refresh failed, keeping current "
                                    "model: ") + e.what();
  }
  return result;
}

namespace {

bool check_update(std::int64_t tick, std::int64_t history_start,
                  std::int64_t history_len, const ModelUpdateMsg& msg) {
  if (!msg.model.valid()) return false;
  if (msg.origin_tick >= 0) {
    const std::int64_t last_tick = history_start + history_len - 1;
    if (msg.origin_tick != last_tick) {
      throw DesyncError("dps: model update origin tick " +
                        std::to_string(msg.origin_tick) +
                        " does not match history end " +
                        std::to_string(last_tick) + " at tick " +
                        std::to_string(tick));
    }
  }
  return true;
}

}  // namespace

bool apply_model_update(DpsNodeState& state, const ModelUpdateMsg& msg) {
  if (!check_update(state.tick, state.shared_history.start_tick,
                    static_cast<std::int64_t>(state.shared_history.size()),
                    msg)) {
    return false;
  }
  state.model = msg.model;
  state.phase = Phase::predicting;
  return true;
}

bool apply_model_update_sink(DpsSinkState& state, const ModelUpdateMsg& msg) {
  if (!check_update(state.tick, state.reconstruction.start_tick,
                    static_cast<std::int64_t>(state.reconstruction.size()),
                    msg)) {
    return false;
  }
  state.model = msg.model;
  state.phase = Phase::predicting;
  return true;
}

double CosimResult::suppression_ratio() const {
  std::int64_t predicting = 0;
  std::int64_t suppressed = 0;
  for (const auto& row : rows) {
    if (row.phase == Phase::predicting) {
      ++predicting;
      if (!row.transmitted) ++suppressed;
    }
  }
  return predicting == 0 ? 0.0
                         : static_cast<double>(suppressed) /
                               static_cast<double>(predicting);
}

CosimResult run_cosim(std::span<const double> trace, const DpsConfig& config) {
  config.validate();
  CosimResult result;
  result.node = make_node_state();
  result.sink = make_sink_state(config);

  for (double truth : trace) {
    const Phase phase_before = result.node.phase;
    const NodeDecision decision = node_step(result.node, truth, config);
    const double reconstructed =
        sink_step(result.sink, decision.value_sent, config);

    CosimRow row;
    row.tick = result.node.tick - 1;
    row.truth = truth;
    row.transmitted = decision.transmitted;
    row.stored = reconstructed;
    row.abs_error = std::abs(truth - reconstructed);
    row.phase = phase_before;
    result.rows.push_back(row);

    if (decision.transmitted) {
      ++result.transmissions;
    } else {
      ++result.suppressions;
    }
    result.max_reconstruction_error =
        std::max(result.max_reconstruction_error, row.abs_error);

    RefreshResult refresh = maybe_refresh_model(result.sink, config);
    if (refresh.message) {
      apply_model_update_sink(result.sink, *refresh.message);
      apply_model_update(result.node, *refresh.message);
      ++result.model_updates;
      result.refresh_ticks.push_back(result.node.tick - 1);
    }
    if (!refresh.diagnostic.empty()) {
      result.diagnostics.push_back(refresh.diagnostic);
    }
  }
  return result;
}

}  // namespace wsn::dps
