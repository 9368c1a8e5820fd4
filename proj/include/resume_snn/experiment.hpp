#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "resume_snn/codec.hpp"
#include "resume_snn/config.hpp"
#include "resume_snn/metrics.hpp"
#include "resume_snn/network.hpp"
#include "resume_snn/random.hpp"
#include "resume_snn/resume.hpp"

namespace resume_snn {

struct EpochRecord {
  int epoch = 0;
  double ste = 0.0;
  int le = 0;
  std::vector<double> hidden_rates;
  int scaling_events = 0;
};

struct RunRecord {
  std::uint64_t run_id = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<EpochRecord> epochs;
  /// Final weights, one flat vector per layer boundary in WeightMatrix layout.
  std::vector<std::vector<double>> final_weights;
  /// Per-epoch snapshots of the same, only with record_weight_snapshots.
  std::vector<std::vector<std::vector<double>>> weight_history;
  LogicalEncoding encoding;
};

inline std::vector<std::vector<double>> snapshot_weights(const LayeredNetwork& net) {
  std::vector<std::vector<double>> out;
  for (std::size_t b = 0; b < net.boundaries(); ++b) {
    const auto w = net.weights(b).values();
    out.emplace_back(w.begin(), w.end());
  }
  return out;
}

/// Everything one training run mutates. Built from the run seed: the encoding
/// is drawn first, then the initial weights, then the presentation sequence.
class Trainer {
 public:
  Trainer(const ExperimentConfig& cfg, std::uint64_t run_seed)
      : cfg_(cfg),
        rng_(run_seed),
        encoding_(generate_encoding(rng_, cfg.arch.bank_size, cfg.traingen)),
        patterns_(build_pattern_set(encoding_, cfg.op)),
        net_(cfg.arch, cfg.lif),
        acc_(net_) {
    net_.init_weights(rng_, cfg.init_low, cfg.init_high);
  }

  /// Learning presentations, weight application, rate scaling, then the
  /// four-case test. Weights change only between the learning and test phases.
  EpochRecord run_epoch(int epoch_index) {
    EpochRecord rec;
    rec.epoch = epoch_index;
    const bool hidden = cfg_.arch.has_hidden();
    std::vector<int> hidden_spikes(hidden ? static_cast<std::size_t>(*cfg_.arch.hidden_size) : 0, 0);

    for (int p = 0; p < cfg_.presentations_per_epoch; ++p) {
      const auto& pc = patterns_[rng_.below_pow2(kNumCases)];
      const auto result = net_.simulate(pc.inputs, cfg_.presentation_duration);
      const std::span<const SpikeTrain> pre = hidden ? std::span<const SpikeTrain>(result.hidden())
                                                     : std::span<const SpikeTrain>(pc.inputs);
      acc_.accumulate(net_, pre, pc.target, result.output(), cfg_.resume);
      if (hidden) {
        for (std::size_t n = 0; n < hidden_spikes.size(); ++n) {
          hidden_spikes[n] += static_cast<int>(result.hidden()[n].size());
        }
      }
      net_.reset();
    }

    acc_.apply(net_);

    if (hidden) {
      const double denom = cfg_.presentations_per_epoch * cfg_.scaling.rate_window;
      rec.hidden_rates.reserve(hidden_spikes.size());
      for (int count : hidden_spikes) rec.hidden_rates.push_back(count / denom);
      rec.scaling_events = scale_rates(net_, rec.hidden_rates, cfg_.scaling);
    }

    const auto errors = test();
    rec.ste = errors.ste;
    rec.le = errors.le;
    return rec;
  }

  /// Runs the four cases without learning and scores the outputs.
  EpochErrors test() {
    std::vector<SpikeTrain> actual;
    std::vector<SpikeTrain> targets;
    for (const auto& pc : patterns_) {
      actual.push_back(net_.simulate(pc.inputs, cfg_.presentation_duration).output());
      targets.push_back(pc.target);
      net_.reset();
    }
    return {spike_train_error(actual, targets, cfg_.kernel),
            logical_error(actual, encoding_.output, cfg_.op, cfg_.kernel)};
  }

  [[nodiscard]] const LayeredNetwork& network() const { return net_; }
  LayeredNetwork& network() { return net_; }
  [[nodiscard]] const LogicalEncoding& encoding() const { return encoding_; }
  [[nodiscard]] const PatternSet& patterns() const { return patterns_; }

 private:
  ExperimentConfig cfg_;
  Rng rng_;
  LogicalEncoding encoding_;
  PatternSet patterns_;
  LayeredNetwork net_;
  WeightDeltaAccumulator acc_;
};

/// One full run. Run `run_id` of a batch seeded with cfg.seed uses
/// derive_run_seed(cfg.seed, run_id), so any run can be regenerated alone.
inline RunRecord run_training(const ExperimentConfig& cfg, std::uint64_t run_id = 0) {
  cfg.validate();
  RunRecord rec;
  rec.run_id = run_id;
  rec.seed = derive_run_seed(cfg.seed, run_id);
  rec.config_digest = config_digest(cfg);
  Trainer trainer(cfg, rec.seed);
  rec.encoding = trainer.encoding();
  rec.epochs.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int e = 0; e < cfg.epochs; ++e) {
    rec.epochs.push_back(trainer.run_epoch(e));
    if (cfg.record_weight_snapshots) rec.weight_history.push_back(snapshot_weights(trainer.network()));
  }
  rec.final_weights = snapshot_weights(trainer.network());
  return rec;
}

/// Runs `n_runs` independent runs (ids first_run .. first_run + n_runs - 1) on
/// up to `jobs` threads. Output order and content do not depend on `jobs`.
inline std::vector<RunRecord> run_batch(const ExperimentConfig& cfg, int n_runs, int jobs = 1,
                                        std::uint64_t first_run = 0) {
  if (n_runs < 1) throw ConfigError("runs must be >= 1");
  cfg.validate();
  std::vector<RunRecord> records(static_cast<std::size_t>(n_runs));
  const int workers = std::clamp(jobs, 1, n_runs);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next++; i < n_runs; i = next++) {
      try {
        records[static_cast<std::size_t>(i)] = run_training(cfg, first_run + static_cast<std::uint64_t>(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

/// Half-open epoch range [start, end).
struct EpochWindow {
  int start = 0;
  int end = 0;
};

struct WindowSummary {
  EpochWindow window;
  double mean_ste = 0.0;
  double sem_ste = 0.0;
  double mean_le = 0.0;
  double sem_le = 0.0;
  std::size_t samples = 0;
};

/// Means and standard errors of STE and LE over every (run, epoch) sample in
/// each window.
inline std::vector<WindowSummary> summarize(const std::vector<RunRecord>& records,
                                            const std::vector<EpochWindow>& windows) {
  if (records.empty()) throw QueryError("summarize: no records");
  std::vector<WindowSummary> out;
  for (const auto& w : windows) {
    if (w.start < 0 || w.end <= w.start) {
      throw QueryError("empty epoch window " + std::to_string(w.start) + ":" + std::to_string(w.end));
    }
    std::vector<double> ste;
    std::vector<double> le;
    for (const auto& r : records) {
      if (static_cast<std::size_t>(w.end) > r.epochs.size()) {
        throw QueryError("epoch window " + std::to_string(w.start) + ":" + std::to_string(w.end) +
                         " exceeds the " + std::to_string(r.epochs.size()) + " recorded epochs of run " +
                         std::to_string(r.run_id));
      }
      for (int e = w.start; e < w.end; ++e) {
        const auto& rec = r.epochs[static_cast<std::size_t>(e)];
        ste.push_back(rec.ste);
        le.push_back(rec.le);
      }
    }
    // samples are shifted by the first one so constant data yields exactly zero spread
    const auto moments = [](const std::vector<double>& x) {
      const double shift = x.front();
      double sum = 0.0;
      for (double v : x) sum += v - shift;
      const double n = static_cast<double>(x.size());
      const double centered = sum / n;
      double ss = 0.0;
      for (double v : x) ss += (v - shift - centered) * (v - shift - centered);
      const double sem = x.size() < 2 ? 0.0 : std::sqrt(ss / (n - 1.0) / n);
      return std::pair{shift + centered, sem};
    };
    WindowSummary s;
    s.window = w;
    s.samples = ste.size();
    std::tie(s.mean_ste, s.sem_ste) = moments(ste);
    std::tie(s.mean_le, s.sem_le) = moments(le);
    out.push_back(s);
  }
  return out;
}

}  // namespace resume_snn
