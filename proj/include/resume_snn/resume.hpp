#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "resume_snn/errors.hpp"
#include "resume_snn/network.hpp"
#include "resume_snn/spike_train.hpp"

namespace resume_snn {

/// Constants of the paired STDP / anti-STDP processes.
struct ResumeParams {
  double a_d = 0.0;      // non-Hebbian term
  double a_di = 0.0005;  // input before output
  double a_id = 0.0005;  // input after output
  double tau_learn = 4.0;

  void validate() const {
    if (!(a_di >= 0.0)) throw ConfigError("a_di must be >= 0");
    if (!(a_id >= 0.0)) throw ConfigError("a_id must be >= 0");
    if (!(tau_learn > 0.0)) throw ConfigError("tau_learn must be > 0");
  }

  friend bool operator==(const ResumeParams&, const ResumeParams&) = default;
};

/// Homeostatic bounds on hidden firing rates (spikes per ms) and scaling factors.
struct ScalingParams {
  double r_min = 0.03;
  double r_max = 0.1;
  double f_up = 0.05;
  double f_down = -0.05;
  /// Milliseconds counted per presentation when converting spike counts to rates.
  double rate_window = 100.0;

  void validate() const {
    if (!(r_min >= 0.0 && r_min < r_max)) throw ConfigError("r_min/r_max: require 0 <= r_min < r_max");
    if (!(f_up > 0.0)) throw ConfigError("f_up must be > 0");
    if (!(f_down < 0.0 && f_down > -1.0)) throw ConfigError("f_down must be in (-1, 0)");
    if (!(rate_window > 0.0)) throw ConfigError("rate_window must be > 0");
  }

  friend bool operator==(const ScalingParams&, const ScalingParams&) = default;
};

/// STDP contribution of one (arriving input, desired output) spike pair.
/// `t_in` is the arrival time, i.e. emission time plus synaptic delay.
inline double pair_delta_desired(double t_in, double t_desired, const ResumeParams& p) {
  const double lag = t_desired - t_in;
  if (lag >= 0.0) return p.a_d + p.a_di * std::exp(-lag / p.tau_learn);
  return p.a_d - p.a_id * std::exp(lag / p.tau_learn);
}

/// Anti-STDP contribution of one (arriving input, actual output) spike pair.
inline double pair_delta_actual(double t_in, double t_actual, const ResumeParams& p) {
  const double lag = t_actual - t_in;
  if (lag >= 0.0) return -p.a_d - p.a_di * std::exp(-lag / p.tau_learn);
  return -p.a_d + p.a_id * std::exp(lag / p.tau_learn);
}

/// Total weight change of one synapse over a presentation: every (input,
/// desired) pair plus every (input, actual) pair, input times shifted by `delay`.
/// Coinciding desired and actual spikes cancel exactly.
inline double train_delta(const SpikeTrain& s_in, Time delay, const SpikeTrain& s_desired, const SpikeTrain& s_actual,
                          const ResumeParams& p) {
  double total = 0.0;
  for (Time t_pre : s_in) {
    const double t_in = static_cast<double>(t_pre) + delay;
    double desired = 0.0;
    double actual = 0.0;
    for (Time t_d : s_desired) desired += pair_delta_desired(t_in, t_d, p);
    for (Time t_a : s_actual) actual += pair_delta_actual(t_in, t_a, p);
    total += desired + actual;
  }
  return total;
}

/// Per-synapse weight changes for the output neuron's incoming synapses,
/// summed over an epoch and applied at its end.
class WeightDeltaAccumulator {
 public:
  explicit WeightDeltaAccumulator(const LayeredNetwork& net) : delta_(net.output_weights().values().size(), 0.0) {}

  /// Adds one presentation's changes. `pre_trains` are the trains of the
  /// neurons feeding the output neuron (hidden layer, or inputs when there is none).
  void accumulate(const LayeredNetwork& net, std::span<const SpikeTrain> pre_trains, const SpikeTrain& target,
                  const SpikeTrain& actual, const ResumeParams& p) {
    const auto& m = net.output_weights();
    if (static_cast<int>(pre_trains.size()) != m.pre_size()) {
      throw ContractError("accumulate: " + std::to_string(pre_trains.size()) + " presynaptic trains for " +
                          std::to_string(m.pre_size()) + " presynaptic neurons");
    }
    for (int pre = 0; pre < m.pre_size(); ++pre) {
      const auto& s_in = pre_trains[static_cast<std::size_t>(pre)];
      if (s_in.empty()) continue;
      for (Time d = kMinDelay; d <= kMaxDelay; ++d) delta_[m.index(pre, 0, d)] += train_delta(s_in, d, target, actual, p);
    }
  }

  /// Adds the deltas to the trained weights, clips, and clears.
  void apply(LayeredNetwork& net) {
    auto w = net.output_weights().values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = clip_weight(w[i] + delta_[i]);
    clear();
  }

  void clear() { std::ranges::fill(delta_, 0.0); }

  [[nodiscard]] std::span<const double> deltas() const { return delta_; }

 private:
  std::vector<double> delta_;
};

/// Multiplicative scaling of one weight: positive weights by (1+f), negative by 1/(1+f).
inline double scale_weight(double w, double f) {
  if (w > 0.0) return clip_weight((1.0 + f) * w);
  if (w < 0.0) return clip_weight(w / (1.0 + f));
  return w;
}

/// Scales all incoming weights of each hidden neuron whose epoch rate lies
/// outside [r_min, r_max]. Returns how many neurons were scaled.
inline int scale_rates(LayeredNetwork& net, std::span<const double> rates, const ScalingParams& sp) {
  if (!net.architecture().has_hidden()) throw ContractError("scale_rates: network has no hidden layer");
  auto& m = net.weights(0);
  if (static_cast<int>(rates.size()) != m.post_size()) throw ContractError("scale_rates: one rate per hidden neuron");
  int scaled = 0;
  for (int y = 0; y < m.post_size(); ++y) {
    const double r = rates[static_cast<std::size_t>(y)];
    double f = 0.0;
    if (r < sp.r_min) {
      f = sp.f_up;
    } else if (r > sp.r_max) {
      f = sp.f_down;
    } else {
      continue;
    }
    ++scaled;
    for (int x = 0; x < m.pre_size(); ++x) {
      for (Time d = kMinDelay; d <= kMaxDelay; ++d) m.at(x, y, d) = scale_weight(m.at(x, y, d), f);
    }
  }
  return scaled;
}

}  // namespace resume_snn
