#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "resume_snn/errors.hpp"
#include "resume_snn/logical_op.hpp"
#include "resume_snn/random.hpp"
#include "resume_snn/spike_train.hpp"

namespace resume_snn {

struct TrainGenParams {
  double rate_input = 0.2;   // spike probability per 1 ms slot
  double rate_output = 0.06;
  Time min_isi = 10;
  Time duration = 100;
  Time output_quiet_head = 20;
  int output_spike_count = 3;
  std::int64_t max_attempts = 1'000'000;

  void validate() const {
    if (!(rate_input > 0.0 && rate_input <= 1.0)) throw ConfigError("rate_input must be in (0, 1]");
    if (!(rate_output > 0.0 && rate_output <= 1.0)) throw ConfigError("rate_output must be in (0, 1]");
    if (min_isi < 1) throw ConfigError("min_isi must be >= 1");
    if (duration < 1) throw ConfigError("train_duration must be >= 1");
    if (!(output_quiet_head >= 0 && output_quiet_head < duration)) {
      throw ConfigError("output_quiet_head must be in [0, train_duration)");
    }
    if (output_spike_count < 0) throw ConfigError("output_spike_count must be >= 0");
    if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  }

  friend bool operator==(const TrainGenParams&, const TrainGenParams&) = default;
};

/// The two trains standing for TRUE and FALSE at one neuron.
struct TrainPair {
  SpikeTrain true_train;
  SpikeTrain false_train;

  [[nodiscard]] const SpikeTrain& for_value(bool value) const { return value ? true_train : false_train; }
  friend bool operator==(const TrainPair&, const TrainPair&) = default;
};

struct LogicalEncoding {
  std::vector<TrainPair> bank_j0;
  std::vector<TrainPair> bank_j1;
  TrainPair output;

  friend bool operator==(const LogicalEncoding&, const LogicalEncoding&) = default;
};

struct PatternCase {
  bool j0 = false;
  bool j1 = false;
  bool target_value = false;
  /// Bank J0 neurons first, then bank J1.
  std::vector<SpikeTrain> inputs;
  SpikeTrain target;
};

/// The four input/target cases of one operation, in (F,F), (F,T), (T,F), (T,T) order.
using PatternSet = std::array<PatternCase, kNumCases>;

/// Bernoulli(rate) spike per slot, except that the min_isi slots following a
/// spike are suppressed. Spikes are therefore more than min_isi apart, so no
/// spike lies within [t - min_isi, t + min_isi] of another.
inline SpikeTrain generate_base_train(Rng& rng, double rate, Time min_isi, Time duration) {
  SpikeTrain s;
  Time last = -min_isi - 1;
  for (Time t = 0; t < duration; ++t) {
    if (t - last <= min_isi) continue;
    if (rng.bernoulli(rate)) {
      s.push_back(t);
      last = t;
    }
  }
  return s;
}

/// Deals each spike of `base` to TRUE or FALSE with probability 1/2.
inline TrainPair split_train_pair(Rng& rng, const SpikeTrain& base) {
  TrainPair pair;
  for (Time t : base) (rng.bernoulli(0.5) ? pair.true_train : pair.false_train).push_back(t);
  return pair;
}

/// Rejection-samples whole base+split draws until both trains carry exactly
/// `output_spike_count` spikes and none falls in the quiet head.
inline TrainPair generate_output_pair(Rng& rng, const TrainGenParams& p) {
  const auto acceptable = [&](const SpikeTrain& s) {
    return static_cast<int>(s.size()) == p.output_spike_count && (s.empty() || s.front() >= p.output_quiet_head);
  };
  for (std::int64_t attempt = 0; attempt < p.max_attempts; ++attempt) {
    auto pair = split_train_pair(rng, generate_base_train(rng, p.rate_output, p.min_isi, p.duration));
    if (acceptable(pair.true_train) && acceptable(pair.false_train)) return pair;
  }
  throw GenerationError("no acceptable output train pair within " + std::to_string(p.max_attempts) + " attempts");
}

inline LogicalEncoding generate_encoding(Rng& rng, int bank_size, const TrainGenParams& p) {
  if (bank_size < 1) throw ConfigError("bank_size must be >= 1");
  LogicalEncoding enc;
  for (auto* bank : {&enc.bank_j0, &enc.bank_j1}) {
    for (int i = 0; i < bank_size; ++i) {
      bank->push_back(split_train_pair(rng, generate_base_train(rng, p.rate_input, p.min_isi, p.duration)));
    }
  }
  enc.output = generate_output_pair(rng, p);
  return enc;
}

inline PatternSet build_pattern_set(const LogicalEncoding& enc, LogicalOp op) {
  PatternSet set;
  for (int c = 0; c < kNumCases; ++c) {
    auto& pc = set[static_cast<std::size_t>(c)];
    pc.j0 = case_j0(c);
    pc.j1 = case_j1(c);
    pc.target_value = evaluate(op, pc.j0, pc.j1);
    pc.inputs.reserve(enc.bank_j0.size() + enc.bank_j1.size());
    for (const auto& pair : enc.bank_j0) pc.inputs.push_back(pair.for_value(pc.j0));
    for (const auto& pair : enc.bank_j1) pc.inputs.push_back(pair.for_value(pc.j1));
    pc.target = enc.output.for_value(pc.target_value);
  }
  return set;
}

}  // namespace resume_snn
