#pragma once

namespace wsn::sim {

enum class EnergyEvent { sample, tx, rx };

struct EnergyModel {
  double battery_joules = 100.0;
  double cost_sample_joules = 0.002;
  double cost_tx_joules = 0.05;
  double cost_rx_joules = 0.03;
};

double event_cost(const EnergyModel& model, EnergyEvent event);

// Battery decremented by the event cost, floored at zero. Crossing zero is
// the caller's cue to halt the node and report a failure.
EnergyModel apply_energy(const EnergyModel& model, EnergyEvent event);

}  // namespace wsn::sim
