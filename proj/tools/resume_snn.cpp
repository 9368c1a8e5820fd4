// Command-line driver: train, batch, summarize, gen-encoding.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "resume_snn/config.hpp"
#include "resume_snn/errors.hpp"
#include "resume_snn/experiment.hpp"
#include "resume_snn/io.hpp"

namespace {

using namespace resume_snn;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct ConfigFlags {
  std::string config_file;
  std::string op;
  std::string arch;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON config file (flat keys) or a run manifest");
    cmd->add_option("--op", op, "Logical operation: true|j0|and|xor");
    cmd->add_option("--arch", arch, "Architecture, e.g. 2x6+20 or 2x10");
    cmd->add_option("--epochs", epochs, "Epochs per run");
    cmd->add_option("--seed", seed, "Base seed (falls back to $RESUME_SNN_SEED)");
    cmd->add_option("--set", sets, "Override any config key: --set key=value")->take_all();
  }

  ConfigBuilder builder() const {
    ConfigBuilder b;
    if (!config_file.empty()) {
      std::ifstream in(config_file, std::ios::binary);
      if (!in) throw IoError("cannot read " + config_file);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      b.merge_text(text, config_file);
    }
    if (!op.empty()) b.set("op", op);
    if (!arch.empty()) {
      const auto a = Architecture::parse(arch);
      b.set("bank_size", a.bank_size);
      b.set("hidden_size", a.hidden_size ? nlohmann::json(*a.hidden_size) : nlohmann::json(nullptr));
    }
    if (epochs) b.set("epochs", *epochs);
    if (seed) b.set("seed", *seed);
    for (const auto& s : sets) b.set_assignment(s);
    return b;
  }
};

int run_and_write(const ConfigFlags& flags, const std::string& out_dir, int runs, int jobs,
                  std::optional<std::uint64_t> first_run) {
  const auto builder = flags.builder();
  const auto cfg = builder.resolve();
  const auto first = first_run.value_or(builder.run_id().value_or(0));
  const auto records = run_batch(cfg, runs, jobs, first);
  write_batch(out_dir, cfg, records, first);
  for (const auto& r : records) {
    const auto& last = r.epochs.back();
    std::printf("run %llu seed %llu: epoch %d ste %s le %d\n", static_cast<unsigned long long>(r.run_id),
                static_cast<unsigned long long>(r.seed), last.epoch, format_g(last.ste).c_str(), last.le);
  }
  std::printf("wrote %zu run(s) to %s\n", records.size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supervised ReSuMe training of layered spiking networks on logical operations"};
  app.require_subcommand(1);

  ConfigFlags train_flags;
  std::string train_out;
  std::optional<std::uint64_t> train_run;
  auto* train = app.add_subcommand("train", "Run a single training run");
  train_flags.attach(train);
  train->add_option("--out", train_out, "Output directory")->required();
  train->add_option("--run-id", train_run, "Run index within the seed's batch (default 0, or the manifest's)");

  ConfigFlags batch_flags;
  std::string batch_out;
  int runs = 1;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::optional<std::uint64_t> batch_first;
  auto* batch = app.add_subcommand("batch", "Run independent training runs");
  batch_flags.attach(batch);
  batch->add_option("--out", batch_out, "Output directory")->required();
  batch->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);
  batch->add_option("--jobs", jobs, "Parallel runs (default: available cores)")->check(CLI::PositiveNumber);
  batch->add_option("--first-run", batch_first, "Index of the first run");

  std::string summarize_in;
  std::string summarize_out;
  std::string windows = "900:1000,1900:2000";
  auto* summarize_cmd = app.add_subcommand("summarize", "Aggregate recorded learning curves over epoch windows");
  summarize_cmd->add_option("--in", summarize_in, "Batch directory, or a directory of batch directories")->required();
  summarize_cmd->add_option("--windows", windows, "Comma-separated half-open windows start:end");
  summarize_cmd->add_option("--out", summarize_out, "Summary CSV path (default <in>/summary.csv)");

  ConfigFlags enc_flags;
  std::string enc_out;
  std::uint64_t enc_run = 0;
  auto* gen = app.add_subcommand("gen-encoding", "Dump the spike-train encoding a run would use, as JSON lines");
  enc_flags.attach(gen);
  gen->add_option("--run-id", enc_run, "Run index within the seed's batch");
  gen->add_option("--out", enc_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train) return run_and_write(train_flags, train_out, 1, 1, train_run);
    if (*batch) return run_and_write(batch_flags, batch_out, runs, jobs, batch_first);
    if (*summarize_cmd) {
      const auto parsed = parse_windows(windows);
      std::vector<SummaryRow> rows;
      for (const auto& dir : find_batches(summarize_in)) {
        const auto loaded = load_batch(dir);
        for (const auto& s : summarize(loaded.records, parsed)) {
          rows.push_back({loaded.config.op, loaded.config.arch.label(), s});
        }
      }
      print_summary_table(std::cout, rows);
      const fs::path out = summarize_out.empty() ? fs::path(summarize_in) / "summary.csv" : fs::path(summarize_out);
      std::ofstream f(out, std::ios::binary | std::ios::trunc);
      if (!f) throw IoError("cannot write " + out.string());
      write_summary_csv(f, rows);
      if (!f.flush()) throw IoError("write failed: " + out.string());
      return 0;
    }
    if (*gen) {
      auto b = enc_flags.builder();
      if (!b.has("op")) b.set("op", "true");  // the encoding does not depend on the operation
      const auto cfg = b.resolve();
      Rng rng(derive_run_seed(cfg.seed, enc_run));
      const auto enc = generate_encoding(rng, cfg.arch.bank_size, cfg.traingen);
      if (enc_out.empty()) {
        write_encoding_jsonl(std::cout, enc);
      } else {
        std::ofstream f(enc_out, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + enc_out);
        write_encoding_jsonl(f, enc);
        if (!f.flush()) throw IoError("write failed: " + enc_out);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const QueryError& e) {
    std::cerr << "query error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
