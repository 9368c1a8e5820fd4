#pragma once

#include "resume_snn/errors.hpp"

namespace resume_snn {

/// Leaky integrate-and-fire constants. Units: mV, MOhm, nF, ms, nA.
/// With these units a unit weight delivered for one 1 ms step raises V by 1 mV.
struct LifParams {
  double v_rest = -60.0;
  double v_threshold = -55.0;
  double v_reset = -65.0;
  double membrane_resistance = 10.0;
  double membrane_capacitance = 1.0;
  double dt = 1.0;

  [[nodiscard]] double tau_membrane() const { return membrane_resistance * membrane_capacitance; }

  void validate() const {
    if (!(v_reset < v_rest && v_rest < v_threshold)) {
      throw ConfigError("LIF potentials must satisfy v_reset < v_rest < v_threshold");
    }
    if (!(membrane_resistance > 0.0)) throw ConfigError("membrane_resistance must be > 0");
    if (!(membrane_capacitance > 0.0)) throw ConfigError("membrane_capacitance must be > 0");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  }

  friend bool operator==(const LifParams&, const LifParams&) = default;
};

struct NeuronState {
  double v = -60.0;
  /// Summed weights of spikes arriving during the current step.
  double input_current = 0.0;
};

/// One forward-Euler step: leak and input together, then threshold test, then
/// reset. No refractory period. Clears the input current. Returns true on a spike.
[[nodiscard]] inline bool lif_step(NeuronState& state, const LifParams& p) {
  const double dv = -(state.v - p.v_rest) / p.tau_membrane() + state.input_current / p.membrane_capacitance;
  state.v += p.dt * dv;
  state.input_current = 0.0;
  if (state.v >= p.v_threshold) {
    state.v = p.v_reset;
    return true;
  }
  return false;
}

}  // namespace resume_snn
