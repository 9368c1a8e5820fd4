#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "resume_snn/experiment.hpp"

namespace resume_snn {
namespace {

ExperimentConfig small(LogicalOp op, std::optional<int> hidden, int epochs = 10) {
  ExperimentConfig cfg;
  cfg.op = op;
  cfg.arch = Architecture{6, hidden};
  cfg.epochs = epochs;
  cfg.seed = 42;
  return cfg;
}

bool same_records(const RunRecord& a, const RunRecord& b) {
  if (a.run_id != b.run_id || a.seed != b.seed || a.config_digest != b.config_digest) return false;
  if (a.epochs.size() != b.epochs.size() || !(a.encoding == b.encoding) || a.final_weights != b.final_weights) {
    return false;
  }
  for (std::size_t e = 0; e < a.epochs.size(); ++e) {
    const auto& x = a.epochs[e];
    const auto& y = b.epochs[e];
    if (x.epoch != y.epoch || x.ste != y.ste || x.le != y.le || x.hidden_rates != y.hidden_rates ||
        x.scaling_events != y.scaling_events) {
      return false;
    }
  }
  return true;
}

TEST(RunTraining, RecordShape) {
  const auto cfg = small(LogicalOp::kXor, 20, 12);
  const auto rec = run_training(cfg, 3);
  EXPECT_EQ(rec.run_id, 3U);
  EXPECT_EQ(rec.seed, derive_run_seed(42, 3));
  EXPECT_EQ(rec.config_digest, config_digest(cfg));
  ASSERT_EQ(rec.epochs.size(), 12U);
  for (int e = 0; e < 12; ++e) {
    const auto& r = rec.epochs[static_cast<std::size_t>(e)];
    EXPECT_EQ(r.epoch, e);
    EXPECT_GE(r.ste, 0.0);
    EXPECT_GE(r.le, 0);
    EXPECT_LE(r.le, 4);
    ASSERT_EQ(r.hidden_rates.size(), 20U);
    for (double rate : r.hidden_rates) {
      EXPECT_GE(rate, 0.0);
      EXPECT_LE(rate, 120.0 / 100.0);
    }
    EXPECT_GE(r.scaling_events, 0);
    EXPECT_LE(r.scaling_events, 20);
  }
  ASSERT_EQ(rec.final_weights.size(), 2U);
  EXPECT_EQ(rec.final_weights[0].size(), 12U * 20U * 10U);
  EXPECT_EQ(rec.final_weights[1].size(), 20U * 10U);
  EXPECT_TRUE(rec.weight_history.empty());
  for (const auto& layer : rec.final_weights) {
    for (double w : layer) EXPECT_LE(std::abs(w), kWeightLimit);
  }
}

TEST(RunTraining, WeightSnapshotsWhenRequested) {
  auto cfg = small(LogicalOp::kAnd, std::nullopt, 4);
  cfg.record_weight_snapshots = true;
  const auto rec = run_training(cfg);
  ASSERT_EQ(rec.weight_history.size(), 4U);
  EXPECT_EQ(rec.weight_history.back(), rec.final_weights);
  EXPECT_TRUE(rec.epochs.front().hidden_rates.empty());
}

TEST(RunTraining, DeterministicForFixedSeedAndRunId) {
  for (auto hidden : {std::optional<int>{}, std::optional<int>{20}}) {
    const auto cfg = small(LogicalOp::kXor, hidden);
    EXPECT_TRUE(same_records(run_training(cfg, 1), run_training(cfg, 1)));
    EXPECT_FALSE(same_records(run_training(cfg, 1), run_training(cfg, 2)));
  }
}

TEST(RunTraining, ZeroAmplitudesWithoutHiddenLayerFreezeEverything) {
  auto cfg = small(LogicalOp::kXor, std::nullopt, 6);
  cfg.resume = ResumeParams{0.0, 0.0, 0.0, 4.0};
  cfg.record_weight_snapshots = true;
  const auto rec = run_training(cfg);
  for (const auto& snap : rec.weight_history) EXPECT_EQ(snap, rec.weight_history.front());
  for (const auto& e : rec.epochs) {
    EXPECT_EQ(e.ste, rec.epochs.front().ste);
    EXPECT_EQ(e.le, rec.epochs.front().le);
  }
}

TEST(RunTraining, LearningOnlyTouchesOutputWeightsAndScalingOnlyHiddenOnes) {
  auto cfg = small(LogicalOp::kXor, 20, 8);
  cfg.resume = ResumeParams{0.0, 0.0, 0.0, 4.0};
  cfg.record_weight_snapshots = true;
  const auto rec = run_training(cfg);
  Trainer fresh(cfg, rec.seed);
  auto previous = snapshot_weights(fresh.network());
  for (std::size_t e = 0; e < rec.epochs.size(); ++e) {
    const auto& snap = rec.weight_history[e];
    EXPECT_EQ(snap[1], previous[1]);
    if (rec.epochs[e].scaling_events == 0) {
      EXPECT_EQ(snap[0], previous[0]);
    } else {
      EXPECT_NE(snap[0], previous[0]);
    }
    previous = snap;
  }
}

TEST(Trainer, FreshThreeLayerNetworkIsSilentAndScoresDistanceToEmpty) {
  const auto cfg = small(LogicalOp::kXor, 20);
  Trainer t(cfg, derive_run_seed(42, 0));
  double expected = 0.0;
  for (const auto& pc : t.patterns()) {
    const auto res = t.network().simulate(pc.inputs, cfg.presentation_duration);
    EXPECT_TRUE(res.output().empty());
    t.network().reset();
    expected += van_rossum_distance(SpikeTrain{}, pc.target, cfg.kernel);
  }
  const auto errors = t.test();
  EXPECT_NEAR(errors.ste, expected, 1e-12);
}

TEST(Trainer, EncodingIsDrawnFirstFromTheRunSeed) {
  const auto cfg = small(LogicalOp::kAnd, 20);
  Trainer t(cfg, 777);
  Rng rng(777);
  EXPECT_EQ(t.encoding(), generate_encoding(rng, 6, cfg.traingen));
}

TEST(RunBatch, IndependentOfJobCount) {
  const auto cfg = small(LogicalOp::kXor, 20, 5);
  const auto serial = run_batch(cfg, 4, 1);
  const auto parallel = run_batch(cfg, 4, 4);
  ASSERT_EQ(serial.size(), 4U);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].run_id, i);
    EXPECT_TRUE(same_records(serial[i], parallel[i]));
  }
}

TEST(RunBatch, SingleRunAndOffsetsMatchRunTraining) {
  const auto cfg = small(LogicalOp::kJ0, std::nullopt, 5);
  EXPECT_TRUE(same_records(run_batch(cfg, 1).front(), run_training(cfg, 0)));
  const auto offset = run_batch(cfg, 2, 2, 5);
  EXPECT_TRUE(same_records(offset[1], run_training(cfg, 6)));
  EXPECT_THROW((void)run_batch(cfg, 0), ConfigError);
}

TEST(RunBatch, InvalidConfigIsRejected) {
  auto cfg = small(LogicalOp::kXor, 20);
  cfg.scaling.r_min = 0.3;
  EXPECT_THROW((void)run_training(cfg), ConfigError);
}

RunRecord synthetic(std::uint64_t id, std::vector<double> ste, std::vector<int> le) {
  RunRecord r;
  r.run_id = id;
  for (std::size_t e = 0; e < ste.size(); ++e) r.epochs.push_back(EpochRecord{static_cast<int>(e), ste[e], le[e], {}, 0});
  return r;
}

TEST(Summarize, MeansAndStandardErrors) {
  const std::vector<RunRecord> recs{synthetic(0, {9.0, 1.0, 2.0}, {4, 0, 1}),
                                    synthetic(1, {9.0, 3.0, 4.0}, {4, 1, 2})};
  const auto s = summarize(recs, {EpochWindow{1, 3}, EpochWindow{0, 1}});
  ASSERT_EQ(s.size(), 2U);
  EXPECT_EQ(s[0].samples, 4U);
  EXPECT_DOUBLE_EQ(s[0].mean_ste, 2.5);
  EXPECT_NEAR(s[0].sem_ste, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(s[0].mean_le, 1.0);
  EXPECT_NEAR(s[0].sem_le, std::sqrt(2.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(s[1].mean_ste, 9.0);
  EXPECT_EQ(s[1].sem_ste, 0.0);
  EXPECT_EQ(s[1].sem_le, 0.0);
}

TEST(Summarize, ConstantDataHasZeroError) {
  std::vector<RunRecord> recs;
  for (std::uint64_t i = 0; i < 5; ++i) recs.push_back(synthetic(i, std::vector<double>(50, 0.1), std::vector<int>(50, 3)));
  const auto s = summarize(recs, {EpochWindow{0, 50}});
  EXPECT_EQ(s[0].sem_ste, 0.0);
  EXPECT_EQ(s[0].sem_le, 0.0);
  EXPECT_NEAR(s[0].mean_ste, 0.1, 1e-15);
}

TEST(Summarize, BadWindowsAreQueryErrors) {
  const std::vector<RunRecord> recs{synthetic(0, {1.0, 2.0}, {0, 0})};
  EXPECT_THROW((void)summarize(recs, {EpochWindow{1, 1}}), QueryError);
  EXPECT_THROW((void)summarize(recs, {EpochWindow{0, 3}}), QueryError);
  EXPECT_THROW((void)summarize(recs, {EpochWindow{-1, 1}}), QueryError);
  EXPECT_THROW((void)summarize({}, {EpochWindow{0, 1}}), QueryError);
}

}  // namespace
}  // namespace resume_snn
