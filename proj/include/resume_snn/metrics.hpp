#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "resume_snn/codec.hpp"
#include "resume_snn/errors.hpp"
#include "resume_snn/logical_op.hpp"
#include "resume_snn/spike_train.hpp"

namespace resume_snn {

/// Causal exponential kernel e^{-t/tau_c} sampled every `dt` over `window` samples.
struct KernelParams {
  double tau_c = 10.0;
  Time window = 120;
  double dt = 1.0;
  /// Scale distances by dt / tau_c, the discrete form of the (1/tau) integral
  /// normalization. Off gives the bare sum of squared differences.
  bool normalized = true;

  void validate() const {
    if (!(tau_c > 0.0)) throw ConfigError("tau_c must be > 0");
    if (window <= 0) throw ConfigError("window must be > 0");
    if (!(dt > 0.0)) throw ConfigError("kernel_dt must be > 0");
  }

  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

struct EpochErrors {
  double ste = 0.0;
  int le = 0;
};

/// g(t) = sum over spikes t' <= t of exp(-(t - t') dt / tau_c), for t in [0, window).
inline std::vector<double> convolve_train(const SpikeTrain& s, const KernelParams& k) {
  if (!s.empty() && (s.front() < 0 || s.back() >= k.window)) {
    throw ContractError("convolve_train: spike outside [0, " + std::to_string(k.window) + ")");
  }
  const double decay = std::exp(-k.dt / k.tau_c);
  std::vector<double> g(static_cast<std::size_t>(k.window), 0.0);
  auto next = s.begin();
  double trace = 0.0;
  for (Time t = 0; t < k.window; ++t) {
    trace *= decay;
    while (next != s.end() && *next == t) {
      trace += 1.0;
      ++next;
    }
    g[static_cast<std::size_t>(t)] = trace;
  }
  return g;
}

/// Squared distance between the two convolved trains, summed over the window
/// (times dt / tau_c when normalized).
inline double van_rossum_distance(const SpikeTrain& a, const SpikeTrain& b, const KernelParams& k) {
  const auto ga = convolve_train(a, k);
  const auto gb = convolve_train(b, k);
  double r = 0.0;
  for (std::size_t i = 0; i < ga.size(); ++i) {
    const double diff = ga[i] - gb[i];
    r += diff * diff;
  }
  return k.normalized ? r * (k.dt / k.tau_c) : r;
}

/// STE: sum of distances between actual and target over the test cases.
inline double spike_train_error(std::span<const SpikeTrain> actual, std::span<const SpikeTrain> targets,
                                const KernelParams& k) {
  if (actual.size() != targets.size()) throw ContractError("spike_train_error: case count mismatch");
  double ste = 0.0;
  for (std::size_t c = 0; c < actual.size(); ++c) ste += van_rossum_distance(actual[c], targets[c], k);
  return ste;
}

/// True when `actual` is strictly closer to the train of `target_value` than to the other one.
inline bool classified_correctly(const SpikeTrain& actual, const TrainPair& output, bool target_value,
                                 const KernelParams& k) {
  return van_rossum_distance(actual, output.for_value(target_value), k) <
         van_rossum_distance(actual, output.for_value(!target_value), k);
}

/// LE: number of the four test cases whose output is not strictly closer to
/// the target value's train. Ties count as wrong.
inline int logical_error(std::span<const SpikeTrain> actual, const TrainPair& output, LogicalOp op,
                         const KernelParams& k) {
  if (actual.size() != kNumCases) throw ContractError("logical_error: expected 4 test cases");
  int wrong = 0;
  for (int c = 0; c < kNumCases; ++c) {
    const bool target_value = evaluate(op, case_j0(c), case_j1(c));
    if (!classified_correctly(actual[static_cast<std::size_t>(c)], output, target_value, k)) ++wrong;
  }
  return wrong;
}

}  // namespace resume_snn
