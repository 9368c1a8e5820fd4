#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "resume_snn/config.hpp"
#include "resume_snn/errors.hpp"
#include "resume_snn/experiment.hpp"

namespace resume_snn {

namespace fs = std::filesystem;

inline constexpr std::string_view kCurvesHeader = "run_id,epoch,ste,le";
inline constexpr std::string_view kSummaryHeader = "op,arch,window_start,window_end,mean_ste,sem_ste,mean_le,sem_le";
inline constexpr std::string_view kCurvesFile = "curves.csv";
inline constexpr std::string_view kBatchManifestFile = "batch.json";

/// printf-style %.<digits>g, locale independent for the C locale.
inline std::string format_g(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

/// Mean with the most significant digit of its standard error in
/// parentheses, e.g. 3.37(2) for 3.3712 +- 0.0213. A zero error prints the
/// mean alone.
inline std::string format_with_error(double mean, double sem) {
  if (!(sem > 0.0) || !std::isfinite(sem)) return format_g(mean, 6);
  int exponent = static_cast<int>(std::floor(std::log10(sem)));
  long digit = std::lround(sem / std::pow(10.0, exponent));
  if (digit >= 10) {
    ++exponent;
    digit = 1;
  }
  const int decimals = std::max(0, -exponent);
  const double unit = std::pow(10.0, exponent);
  char buf[64];
  if (exponent > 0) {
    std::snprintf(buf, sizeof buf, "%.0f(%.0f)", std::round(mean / unit) * unit, digit * unit);
  } else {
    std::snprintf(buf, sizeof buf, "%.*f(%ld)", decimals, mean, digit);
  }
  return buf;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_curves_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kCurvesHeader << '\n';
  for (const auto& r : records) {
    for (const auto& e : r.epochs) out << r.run_id << ',' << e.epoch << ',' << format_g(e.ste, 6) << ',' << e.le << '\n';
  }
}

/// Parses a learning-curve CSV back into per-run epoch records (STE and LE only).
inline std::map<std::uint64_t, std::vector<EpochRecord>> read_curves_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line) || line != kCurvesHeader) {
    throw ConfigError(origin + ": expected header '" + std::string(kCurvesHeader) + "'");
  }
  std::map<std::uint64_t, std::vector<EpochRecord>> runs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string run, epoch, ste, le;
    if (!std::getline(row, run, ',') || !std::getline(row, epoch, ',') || !std::getline(row, ste, ',') ||
        !std::getline(row, le)) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed row");
    }
    EpochRecord rec;
    try {
      rec.epoch = std::stoi(epoch);
      rec.ste = std::stod(ste);
      rec.le = std::stoi(le);
      auto& epochs = runs[std::stoull(run)];
      if (rec.epoch != static_cast<int>(epochs.size())) {
        throw ConfigError("epochs not contiguous");
      }
      epochs.push_back(rec);
    } catch (const std::exception& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return runs;
}

/// One JSON object per neuron pair: role, bank, neuron, true_times, false_times.
inline void write_encoding_jsonl(std::ostream& out, const LogicalEncoding& enc) {
  const auto line = [&](const char* role, nlohmann::json bank, std::size_t neuron, const TrainPair& p) {
    nlohmann::json j;
    j["role"] = role;
    j["bank"] = std::move(bank);
    j["neuron"] = neuron;
    j["true_times"] = std::vector<Time>(p.true_train.begin(), p.true_train.end());
    j["false_times"] = std::vector<Time>(p.false_train.begin(), p.false_train.end());
    out << j.dump() << '\n';
  };
  for (std::size_t i = 0; i < enc.bank_j0.size(); ++i) line("input", 0, i, enc.bank_j0[i]);
  for (std::size_t i = 0; i < enc.bank_j1.size(); ++i) line("input", 1, i, enc.bank_j1[i]);
  line("output", nullptr, 0, enc.output);
}

/// boundary,pre,post,delay,weight with round-trip precision.
inline void write_weights_csv(std::ostream& out, const Architecture& arch,
                              const std::vector<std::vector<double>>& weights) {
  out << "boundary,pre,post,delay,weight\n";
  const auto sizes = arch.layer_sizes();
  for (std::size_t b = 0; b < weights.size(); ++b) {
    WeightMatrix layout(sizes[b], sizes[b + 1]);
    for (int pre = 0; pre < layout.pre_size(); ++pre) {
      for (int post = 0; post < layout.post_size(); ++post) {
        for (Time d = kMinDelay; d <= kMaxDelay; ++d) {
          out << b << ',' << pre << ',' << post << ',' << d << ',' << format_g(weights[b][layout.index(pre, post, d)], 17)
              << '\n';
        }
      }
    }
  }
}

inline nlohmann::json batch_manifest(const ExperimentConfig& cfg, int runs, std::uint64_t first_run,
                                     const std::string& created) {
  nlohmann::json j;
  j["software"] = kSoftwareName;
  j["version"] = kSoftwareVersion;
  j["created"] = created;
  j["config_digest"] = config_digest(cfg);
  j["runs"] = runs;
  j["first_run"] = first_run;
  j["config"] = to_json(cfg);
  return j;
}

/// Everything needed to regenerate one run: `train --config manifest.json`
/// reads the nested config and run_id.
inline nlohmann::json run_manifest(const ExperimentConfig& cfg, const RunRecord& r, const std::string& created) {
  nlohmann::json j;
  j["software"] = kSoftwareName;
  j["version"] = kSoftwareVersion;
  j["created"] = created;
  j["run_id"] = r.run_id;
  j["run_seed"] = r.seed;
  j["config_digest"] = r.config_digest;
  j["config"] = to_json(cfg);
  j["encoding"] = "encoding.jsonl";
  j["weights"] = "weights.csv";
  return j;
}

inline std::string run_dir_name(std::uint64_t run_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%04llu", static_cast<unsigned long long>(run_id));
  return buf;
}

namespace detail {

inline std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

inline void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

inline nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace detail

/// Writes curves.csv, batch.json and one run_NNNN/ directory (manifest,
/// encoding dump, final weights) per record.
inline void write_batch(const fs::path& dir, const ExperimentConfig& cfg, const std::vector<RunRecord>& records,
                        std::uint64_t first_run) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto created = utc_timestamp();

  const auto curves = dir / kCurvesFile;
  auto out = detail::open_out(curves);
  write_curves_csv(out, records);
  detail::finish(out, curves);

  const auto manifest = dir / kBatchManifestFile;
  out = detail::open_out(manifest);
  out << batch_manifest(cfg, static_cast<int>(records.size()), first_run, created).dump(2) << '\n';
  detail::finish(out, manifest);

  for (const auto& r : records) {
    const auto run_dir = dir / run_dir_name(r.run_id);
    fs::create_directories(run_dir, ec);
    if (ec) throw IoError("cannot create " + run_dir.string() + ": " + ec.message());
    const auto m = run_dir / "manifest.json";
    out = detail::open_out(m);
    out << run_manifest(cfg, r, created).dump(2) << '\n';
    detail::finish(out, m);
    const auto e = run_dir / "encoding.jsonl";
    out = detail::open_out(e);
    write_encoding_jsonl(out, r.encoding);
    detail::finish(out, e);
    const auto w = run_dir / "weights.csv";
    out = detail::open_out(w);
    write_weights_csv(out, cfg.arch, r.final_weights);
    detail::finish(out, w);
  }
}

struct LoadedBatch {
  fs::path dir;
  ExperimentConfig config;
  std::string digest;
  std::vector<RunRecord> records;
};

/// Reads a batch directory written by write_batch. Every run manifest must
/// carry the batch's config digest.
inline LoadedBatch load_batch(const fs::path& dir) {
  LoadedBatch batch;
  batch.dir = dir;
  const auto manifest = detail::read_json(dir / kBatchManifestFile);
  ConfigBuilder builder;
  builder.merge_json(manifest.at("config"), (dir / kBatchManifestFile).string());
  batch.config = builder.resolve();
  batch.digest = config_digest(batch.config);

  std::set<std::string> digests{batch.digest};
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto m = entry.path() / "manifest.json";
    if (!entry.is_directory() || !fs::exists(m)) continue;
    const auto run = detail::read_json(m);
    digests.insert(run.value("config_digest", std::string("<missing>")));
  }
  if (digests.size() > 1) {
    std::string list;
    for (const auto& d : digests) list += (list.empty() ? "" : ", ") + d;
    throw ConfigError(dir.string() + ": runs have inconsistent configs (digests " + list + ")");
  }

  const auto curves = dir / kCurvesFile;
  std::ifstream in(curves, std::ios::binary);
  if (!in) throw IoError("cannot read " + curves.string());
  for (auto& [run_id, epochs] : read_curves_csv(in, curves.string())) {
    RunRecord r;
    r.run_id = run_id;
    r.config_digest = batch.digest;
    r.epochs = std::move(epochs);
    batch.records.push_back(std::move(r));
  }
  return batch;
}

/// The batch directories under `root`: root itself if it holds a batch,
/// otherwise its immediate subdirectories that do, in name order.
inline std::vector<fs::path> find_batches(const fs::path& root) {
  if (fs::exists(root / kBatchManifestFile)) return {root};
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / kBatchManifestFile)) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw IoError("no batch directories under " + root.string());
  return out;
}

struct SummaryRow {
  LogicalOp op;
  std::string arch;
  WindowSummary stats;
};

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.op) << ',' << r.arch << ',' << r.stats.window.start << ',' << r.stats.window.end << ','
        << format_g(r.stats.mean_ste) << ',' << format_g(r.stats.sem_ste) << ',' << format_g(r.stats.mean_le) << ','
        << format_g(r.stats.sem_le) << '\n';
  }
}

/// Human-readable table: one block per architecture, rows = (op, error), columns = windows.
inline void print_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows) {
  std::map<std::string, std::map<std::string, std::vector<const SummaryRow*>>> grouped;
  std::vector<std::string> arch_order;
  for (const auto& r : rows) {
    if (!grouped.contains(r.arch)) arch_order.push_back(r.arch);
    grouped[r.arch][std::string(to_string(r.op))].push_back(&r);
  }
  for (const auto& arch : arch_order) {
    out << "arch " << arch << '\n';
    bool header = false;
    for (const auto& [op, cells] : grouped[arch]) {
      if (!header) {
        out << std::left << std::setw(8) << "op" << std::setw(6) << "error";
        for (const auto* c : cells) {
          out << std::setw(16) << (std::to_string(c->stats.window.start) + "-" + std::to_string(c->stats.window.end - 1));
        }
        out << '\n';
        header = true;
      }
      out << std::setw(8) << op << std::setw(6) << "STE";
      for (const auto* c : cells) out << std::setw(16) << format_with_error(c->stats.mean_ste, c->stats.sem_ste);
      out << '\n' << std::setw(8) << "" << std::setw(6) << "LE";
      for (const auto* c : cells) out << std::setw(16) << format_with_error(c->stats.mean_le, c->stats.sem_le);
      out << '\n';
    }
  }
}

/// Parses "900:1000,1900:2000" into half-open epoch windows.
inline std::vector<EpochWindow> parse_windows(const std::string& text) {
  std::vector<EpochWindow> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("");
      std::size_t p1 = 0, p2 = 0;
      const auto a = item.substr(0, colon), b = item.substr(colon + 1);
      EpochWindow w{std::stoi(a, &p1), std::stoi(b, &p2)};
      if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("");
      out.push_back(w);
    } catch (const std::exception&) {
      throw ConfigError("--windows: expected start:end, got '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--windows: no windows given");
  return out;
}

}  // namespace resume_snn
