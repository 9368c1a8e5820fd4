#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resume_snn/errors.hpp"
#include "resume_snn/lif.hpp"
#include "resume_snn/random.hpp"
#include "resume_snn/spike_train.hpp"

namespace resume_snn {

inline constexpr Time kMinDelay = 1;
inline constexpr Time kMaxDelay = 10;
inline constexpr int kDelaysPerPair = kMaxDelay - kMinDelay + 1;
inline constexpr double kWeightLimit = 2.0;

inline double clip_weight(double w) { return std::clamp(w, -kWeightLimit, kWeightLimit); }

/// Two equal input banks, an optional hidden layer and a single output neuron.
struct Architecture {
  int bank_size = 6;
  std::optional<int> hidden_size;

  [[nodiscard]] int input_size() const { return 2 * bank_size; }
  [[nodiscard]] bool has_hidden() const { return hidden_size.has_value(); }

  [[nodiscard]] std::vector<int> layer_sizes() const {
    std::vector<int> sizes{input_size()};
    if (hidden_size) sizes.push_back(*hidden_size);
    sizes.push_back(1);
    return sizes;
  }

  void validate() const {
    if (bank_size < 1) throw ConfigError("bank_size must be >= 1");
    if (hidden_size && *hidden_size < 1) throw ConfigError("hidden_size must be >= 1");
  }

  /// `2x6+20` for banks of 6 with 20 hidden neurons, `2x10` without hidden layer.
  [[nodiscard]] std::string label() const {
    auto s = "2x" + std::to_string(bank_size);
    if (hidden_size) s += "+" + std::to_string(*hidden_size);
    return s;
  }

  static Architecture parse(const std::string& text) {
    Architecture a;
    std::size_t pos = 0;
    try {
      if (text.rfind("2x", 0) != 0) throw ConfigError("");
      const auto plus = text.find('+');
      const auto bank = text.substr(2, plus == std::string::npos ? std::string::npos : plus - 2);
      a.bank_size = std::stoi(bank, &pos);
      if (pos != bank.size()) throw ConfigError("");
      if (plus != std::string::npos) {
        const auto hidden = text.substr(plus + 1);
        a.hidden_size = std::stoi(hidden, &pos);
        if (pos != hidden.size()) throw ConfigError("");
      }
    } catch (const std::exception&) {
      throw ConfigError("arch: expected 2xB or 2xB+H, got '" + text + "'");
    }
    a.validate();
    return a;
  }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Weights between two adjacent layers: one synapse per (pre, post, delay).
class WeightMatrix {
 public:
  WeightMatrix(int pre, int post) : pre_(pre), post_(post), w_(static_cast<std::size_t>(pre) * post * kDelaysPerPair) {}

  [[nodiscard]] int pre_size() const { return pre_; }
  [[nodiscard]] int post_size() const { return post_; }

  [[nodiscard]] std::size_t index(int pre, int post, Time delay) const {
    return (static_cast<std::size_t>(pre) * post_ + post) * kDelaysPerPair + (delay - kMinDelay);
  }
  double& at(int pre, int post, Time delay) { return w_[index(pre, post, delay)]; }
  [[nodiscard]] double at(int pre, int post, Time delay) const { return w_[index(pre, post, delay)]; }

  /// All weights from `pre`, laid out [post][delay].
  [[nodiscard]] std::span<const double> row(int pre) const {
    return std::span(w_).subspan(static_cast<std::size_t>(pre) * post_ * kDelaysPerPair,
                                 static_cast<std::size_t>(post_) * kDelaysPerPair);
  }

  [[nodiscard]] std::span<double> values() { return w_; }
  [[nodiscard]] std::span<const double> values() const { return w_; }

 private:
  int pre_;
  int post_;
  std::vector<double> w_;
};

/// Spike trains of every non-input neuron for one presentation.
struct PresentationResult {
  /// layers[0] is the first layer after the inputs; the last entry is the output layer.
  std::vector<std::vector<SpikeTrain>> layers;
  Time duration = 0;

  [[nodiscard]] const SpikeTrain& output() const { return layers.back().front(); }
  [[nodiscard]] const std::vector<SpikeTrain>& hidden() const { return layers.front(); }
};

class LayeredNetwork {
 public:
  LayeredNetwork(Architecture arch, LifParams lif) : arch_(arch), lif_(lif) {
    arch_.validate();
    lif_.validate();
    const auto sizes = arch_.layer_sizes();
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) weights_.emplace_back(sizes[l], sizes[l + 1]);
    for (std::size_t l = 1; l < sizes.size(); ++l) {
      states_.emplace_back(static_cast<std::size_t>(sizes[l]));
      pending_.emplace_back(static_cast<std::size_t>(sizes[l]) * kRing, 0.0);
    }
    reset();
  }

  [[nodiscard]] const Architecture& architecture() const { return arch_; }
  [[nodiscard]] const LifParams& lif() const { return lif_; }

  /// Number of weight matrices (layer boundaries).
  [[nodiscard]] std::size_t boundaries() const { return weights_.size(); }
  WeightMatrix& weights(std::size_t boundary) { return weights_.at(boundary); }
  [[nodiscard]] const WeightMatrix& weights(std::size_t boundary) const { return weights_.at(boundary); }
  /// Synapses into the output neuron; these are the ones ReSuMe trains.
  WeightMatrix& output_weights() { return weights_.back(); }
  [[nodiscard]] const WeightMatrix& output_weights() const { return weights_.back(); }

  [[nodiscard]] std::span<const NeuronState> states(std::size_t layer) const { return states_.at(layer); }

  /// Every membrane back to rest, every pending delivery dropped.
  void reset() {
    for (auto& layer : states_) std::ranges::fill(layer, NeuronState{lif_.v_rest, 0.0});
    for (auto& buf : pending_) std::ranges::fill(buf, 0.0);
  }

  [[nodiscard]] bool has_pending() const {
    return std::ranges::any_of(pending_, [](const auto& buf) { return std::ranges::any_of(buf, [](double x) { return x != 0.0; }); });
  }

  /// Draws every weight i.i.d. uniform from [low, high].
  void init_weights(Rng& rng, double low = -0.02, double high = 0.08) {
    if (!(low < high)) throw ConfigError("init_weights: low must be < high");
    for (auto& m : weights_) {
      for (auto& w : m.values()) w = rng.uniform(low, high);
    }
  }

  /// Runs one presentation from the current state. Input neuron i emits exactly
  /// `inputs[i]`. Deliveries landing at or after `duration` are discarded.
  PresentationResult simulate(std::span<const SpikeTrain> inputs, Time duration) {
    if (static_cast<int>(inputs.size()) != arch_.input_size()) {
      throw ConfigError("simulate: got " + std::to_string(inputs.size()) + " input trains for " +
                        std::to_string(arch_.input_size()) + " input neurons");
    }
    PresentationResult result;
    result.duration = duration;
    for (const auto& layer : states_) result.layers.emplace_back(layer.size());

    std::vector<std::size_t> cursor(inputs.size(), 0);
    for (Time t = 0; t < duration; ++t) {
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto times = inputs[i].times();
        auto& c = cursor[i];
        while (c < times.size() && times[c] < t) ++c;
        if (c < times.size() && times[c] == t) deliver(0, static_cast<int>(i), t, duration);
      }
      const auto slot = static_cast<std::size_t>(t % kRing);
      for (std::size_t l = 0; l < states_.size(); ++l) {
        auto& layer = states_[l];
        auto& buf = pending_[l];
        for (std::size_t n = 0; n < layer.size(); ++n) {
          auto& cell = buf[n * kRing + slot];
          layer[n].input_current += cell;
          cell = 0.0;
          if (lif_step(layer[n], lif_)) {
            result.layers[l][n].push_back(t);
            if (l + 1 < states_.size()) deliver(l + 1, static_cast<int>(n), t, duration);
          }
        }
      }
    }
    return result;
  }

 private:
  static constexpr Time kRing = kMaxDelay + 1;

  void deliver(std::size_t boundary, int pre, Time t, Time duration) {
    const auto& m = weights_[boundary];
    auto& buf = pending_[boundary];
    const auto row = m.row(pre);
    const Time last_delay = std::min<Time>(kMaxDelay, duration - 1 - t);
    for (int post = 0; post < m.post_size(); ++post) {
      const double* w = row.data() + static_cast<std::size_t>(post) * kDelaysPerPair;
      double* ring = buf.data() + static_cast<std::size_t>(post) * kRing;
      for (Time d = kMinDelay; d <= last_delay; ++d) ring[(t + d) % kRing] += w[d - kMinDelay];
    }
  }

  Architecture arch_;
  LifParams lif_;
  std::vector<WeightMatrix> weights_;
  std::vector<std::vector<NeuronState>> states_;
  std::vector<std::vector<double>> pending_;
};

}  // namespace resume_snn
