#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "resume_snn/io.hpp"

namespace resume_snn {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("resume_snn_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ConfigBuilder minimal() {
  ConfigBuilder b;
  b.set("op", "xor");
  b.set("bank_size", 6);
  b.set("seed", 9);
  return b;
}

TEST(ConfigBuilder, DefaultsFillEverythingButRequiredKeys) {
  const auto cfg = minimal().resolve();
  ExperimentConfig expected;
  expected.op = LogicalOp::kXor;
  expected.arch = Architecture{6, std::nullopt};
  expected.seed = 9;
  EXPECT_EQ(cfg, expected);
  EXPECT_FALSE(cfg.arch.has_hidden());
  EXPECT_EQ(cfg.epochs, 2000);
  EXPECT_EQ(cfg.presentations_per_epoch, 10);
  EXPECT_EQ(cfg.scaling.r_min, 0.03);
  EXPECT_EQ(cfg.scaling.r_max, 0.1);
}

TEST(ConfigBuilder, MissingRequiredKeyNamesIt) {
  ConfigBuilder b;
  b.set("op", "and");
  try {
    (void)b.resolve();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bank_size"), std::string::npos);
  }
}

TEST(ConfigBuilder, UnknownKeyAndBadValues) {
  ConfigBuilder b = minimal();
  EXPECT_THROW(b.set("learning_rate", 1), ConfigError);
  EXPECT_THROW(b.set_assignment("novalue"), ConfigError);
  b.set("op", "nand");
  EXPECT_THROW((void)b.resolve(), ConfigError);
  b = minimal();
  b.set("epochs", "many");
  EXPECT_THROW((void)b.resolve(), ConfigError);
  b = minimal();
  b.set("epochs", 0);
  EXPECT_THROW((void)b.resolve(), ConfigError);
}

TEST(ConfigBuilder, SwappedRateBoundsFailValidation) {
  ConfigBuilder b = minimal();
  b.set("r_min", 0.3);
  try {
    (void)b.resolve();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("r_min"), std::string::npos);
  }
  b.set("r_max", 0.3);
  b.set("r_min", 0.1);
  EXPECT_NO_THROW((void)b.resolve());
}

TEST(ConfigBuilder, AssignmentsAndLaterSettingsWin) {
  ConfigBuilder b = minimal();
  b.merge_text(R"({"op": "and", "hidden_size": 20, "epochs": 50})", "file");
  b.set_assignment("epochs=7");
  b.set_assignment("op=J0");
  b.set_assignment("normalized_distance=false");
  const auto cfg = b.resolve();
  EXPECT_EQ(cfg.op, LogicalOp::kJ0);
  EXPECT_EQ(cfg.epochs, 7);
  EXPECT_EQ(cfg.arch.hidden_size, 20);
  EXPECT_FALSE(cfg.kernel.normalized);
  b.set_assignment("hidden_size=none");
  EXPECT_FALSE(b.resolve().arch.has_hidden());
  EXPECT_THROW(b.merge_text("{not json", "file"), ConfigError);
  EXPECT_THROW(b.merge_text("[1, 2]", "file"), ConfigError);
}

TEST(ConfigBuilder, SeedFallsBackToEnvironmentThenOne) {
  ConfigBuilder b;
  b.set("op", "true");
  b.set("bank_size", 2);
  ::unsetenv(kSeedEnvVar);
  EXPECT_EQ(b.resolve().seed, 1U);
  ::setenv(kSeedEnvVar, "1234", 1);
  EXPECT_EQ(b.resolve().seed, 1234U);
  ::setenv(kSeedEnvVar, "12ab", 1);
  EXPECT_THROW((void)b.resolve(), ConfigError);
  b.set("seed", 5);
  EXPECT_EQ(b.resolve().seed, 5U);
  ::unsetenv(kSeedEnvVar);
}

TEST(ConfigBuilder, JsonRoundTripAndManifestInput) {
  auto b = minimal();
  b.set("hidden_size", 20);
  b.set("tau_c", 8.5);
  const auto cfg = b.resolve();
  ConfigBuilder again;
  again.merge_json(to_json(cfg));
  EXPECT_EQ(again.resolve(), cfg);

  RunRecord r;
  r.run_id = 17;
  r.seed = derive_run_seed(cfg.seed, 17);
  r.config_digest = config_digest(cfg);
  ConfigBuilder from_manifest;
  from_manifest.merge_json(run_manifest(cfg, r, "t"));
  EXPECT_EQ(from_manifest.resolve(), cfg);
  EXPECT_EQ(from_manifest.run_id(), 17U);
}

TEST(ConfigDigest, IgnoresSeedOnly) {
  auto a = minimal().resolve();
  auto b = a;
  b.seed = 99;
  EXPECT_EQ(config_digest(a), config_digest(b));
  EXPECT_EQ(config_digest(a).size(), 16U);
  b.resume.a_di = 0.001;
  EXPECT_NE(config_digest(a), config_digest(b));
}

TEST(Format, MeanWithLeadingErrorDigit) {
  EXPECT_EQ(format_with_error(3.3712, 0.0213), "3.37(2)");
  EXPECT_EQ(format_with_error(0.129, 0.009), "0.129(9)");
  EXPECT_EQ(format_with_error(0.1234, 0.0096), "0.12(1)");
  EXPECT_EQ(format_with_error(1.965, 0.16), "2.0(2)");
  EXPECT_EQ(format_with_error(0.0, 0.0), "0");
  EXPECT_EQ(format_g(1.0 / 3.0), "0.333333");
}

TEST(Format, Windows) {
  const auto w = parse_windows("900:1000,1900:2000");
  ASSERT_EQ(w.size(), 2U);
  EXPECT_EQ(w[0].start, 900);
  EXPECT_EQ(w[1].end, 2000);
  EXPECT_THROW((void)parse_windows("900-1000"), ConfigError);
  EXPECT_THROW((void)parse_windows("a:b"), ConfigError);
  EXPECT_THROW((void)parse_windows(""), ConfigError);
}

TEST(Csv, CurvesFormatAndRoundTrip) {
  RunRecord r;
  r.run_id = 2;
  r.epochs = {EpochRecord{0, 1.0 / 3.0, 4, {}, 0}, EpochRecord{1, 12.5, 0, {}, 0}};
  std::ostringstream out;
  write_curves_csv(out, {r});
  EXPECT_EQ(out.str(), "run_id,epoch,ste,le\n2,0,0.333333,4\n2,1,12.5,0\n");
  std::istringstream in(out.str());
  const auto back = read_curves_csv(in, "mem");
  ASSERT_EQ(back.at(2).size(), 2U);
  EXPECT_EQ(back.at(2)[1].ste, 12.5);
  EXPECT_EQ(back.at(2)[0].le, 4);

  std::istringstream bad_header("run,epoch,ste,le\n");
  EXPECT_THROW((void)read_curves_csv(bad_header, "mem"), ConfigError);
  std::istringstream gap("run_id,epoch,ste,le\n0,0,1,1\n0,2,1,1\n");
  EXPECT_THROW((void)read_curves_csv(gap, "mem"), ConfigError);
}

TEST(Csv, SummaryHeaderAndRow) {
  std::ostringstream out;
  write_summary_csv(out, {SummaryRow{LogicalOp::kXor, "2x6+20", WindowSummary{{900, 1000}, 3.2, 0.035, 0.164, 0.009, 2000}}});
  EXPECT_EQ(out.str(),
            "op,arch,window_start,window_end,mean_ste,sem_ste,mean_le,sem_le\n"
            "xor,2x6+20,900,1000,3.2,0.035,0.164,0.009\n");
}

TEST(Encoding, JsonLinesDump) {
  LogicalEncoding enc;
  enc.bank_j0 = {TrainPair{SpikeTrain{3}, SpikeTrain{20, 40}}};
  enc.bank_j1 = {TrainPair{SpikeTrain{}, SpikeTrain{7}}};
  enc.output = TrainPair{SpikeTrain{25, 50, 75}, SpikeTrain{30, 60, 90}};
  std::ostringstream out;
  write_encoding_jsonl(out, enc);
  EXPECT_EQ(out.str(),
            "{\"bank\":0,\"false_times\":[20,40],\"neuron\":0,\"role\":\"input\",\"true_times\":[3]}\n"
            "{\"bank\":1,\"false_times\":[7],\"neuron\":0,\"role\":\"input\",\"true_times\":[]}\n"
            "{\"bank\":null,\"false_times\":[30,60,90],\"neuron\":0,\"role\":\"output\",\"true_times\":[25,50,75]}\n");
}

TEST(Batch, WriteThenLoad) {
  const auto dir = scratch_dir("batch");
  auto b = minimal();
  b.set("epochs", 3);
  b.set("hidden_size", 4);
  const auto cfg = b.resolve();
  const auto records = run_batch(cfg, 2, 1, 10);
  write_batch(dir, cfg, records, 10);
  EXPECT_TRUE(fs::exists(dir / "run_0010" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "run_0011" / "encoding.jsonl"));
  const auto weights = slurp(dir / "run_0011" / "weights.csv");
  EXPECT_EQ(weights.rfind("boundary,pre,post,delay,weight\n", 0), 0U);
  EXPECT_EQ(std::count(weights.begin(), weights.end(), '\n'), 1 + 12 * 4 * 10 + 4 * 10);

  const auto loaded = load_batch(dir);
  EXPECT_EQ(loaded.config, cfg);
  ASSERT_EQ(loaded.records.size(), 2U);
  EXPECT_EQ(loaded.records[1].run_id, 11U);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t e = 0; e < 3; ++e) {
      EXPECT_EQ(loaded.records[i].epochs[e].le, records[i].epochs[e].le);
      EXPECT_NEAR(loaded.records[i].epochs[e].ste, records[i].epochs[e].ste, 1e-5 * (1 + records[i].epochs[e].ste));
    }
  }
  EXPECT_EQ(find_batches(dir), std::vector<fs::path>{dir});
  fs::remove_all(dir);
}

TEST(Batch, InconsistentRunManifestsAreRejected) {
  const auto dir = scratch_dir("mismatch");
  auto b = minimal();
  b.set("epochs", 2);
  const auto cfg = b.resolve();
  write_batch(dir, cfg, run_batch(cfg, 2), 0);
  auto m = nlohmann::json::parse(slurp(dir / "run_0001" / "manifest.json"));
  m["config_digest"] = "0000000000000000";
  std::ofstream(dir / "run_0001" / "manifest.json") << m.dump();
  try {
    (void)load_batch(dir);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("0000000000000000"), std::string::npos);
  }
  fs::remove_all(dir);
}

TEST(Batch, MissingDirectoryIsIoError) {
  EXPECT_THROW((void)load_batch("/nonexistent/resume_snn"), IoError);
  EXPECT_THROW((void)find_batches("/nonexistent/resume_snn"), IoError);
}

}  // namespace
}  // namespace resume_snn
