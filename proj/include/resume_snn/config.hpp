#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "resume_snn/codec.hpp"
#include "resume_snn/errors.hpp"
#include "resume_snn/lif.hpp"
#include "resume_snn/logical_op.hpp"
#include "resume_snn/metrics.hpp"
#include "resume_snn/network.hpp"
#include "resume_snn/resume.hpp"

namespace resume_snn {

inline constexpr std::string_view kSoftwareName = "resume-snn";
inline constexpr std::string_view kSoftwareVersion = "0.1.0";
inline constexpr const char* kSeedEnvVar = "RESUME_SNN_SEED";

struct ExperimentConfig {
  LogicalOp op = LogicalOp::kXor;
  Architecture arch;
  int epochs = 2000;
  int presentations_per_epoch = 10;
  /// Input train length plus twice the maximal delay.
  Time presentation_duration = 120;
  std::uint64_t seed = 1;
  double init_low = -0.02;
  double init_high = 0.08;
  bool record_weight_snapshots = false;
  LifParams lif;
  ResumeParams resume;
  ScalingParams scaling;
  TrainGenParams traingen;
  KernelParams kernel;

  void validate() const {
    arch.validate();
    lif.validate();
    resume.validate();
    scaling.validate();
    traingen.validate();
    kernel.validate();
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (presentations_per_epoch < 1) throw ConfigError("presentations_per_epoch must be >= 1");
    if (presentation_duration < traingen.duration) {
      throw ConfigError("presentation_duration must be >= train_duration");
    }
    if (kernel.window < presentation_duration) throw ConfigError("window must cover presentation_duration");
    if (!(init_low < init_high)) throw ConfigError("init_low must be < init_high");
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

using Json = nlohmann::json;
using Setter = std::function<void(ExperimentConfig&, const Json&)>;

template <typename T>
T number_as(const Json& v) {
  if (v.is_string()) {
    // values arriving from `--set key=value` that did not parse as JSON
    throw ConfigError("expected a number, got '" + v.get<std::string>() + "'");
  }
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError("expected an integer, got " + v.dump());
  } else {
    if (!v.is_number()) throw ConfigError("expected a number, got " + v.dump());
  }
  return v.get<T>();
}

template <typename T>
Setter field(T ExperimentConfig::*member) {
  return [member](ExperimentConfig& c, const Json& v) { c.*member = number_as<T>(v); };
}

template <typename Group, typename T>
Setter nested(Group ExperimentConfig::*group, T Group::*member) {
  return [group, member](ExperimentConfig& c, const Json& v) { (c.*group).*member = number_as<T>(v); };
}

inline const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"op", [](ExperimentConfig& c, const Json& v) {
         if (!v.is_string()) throw ConfigError("expected a string");
         c.op = parse_op(v.get<std::string>());
       }},
      {"bank_size", [](ExperimentConfig& c, const Json& v) { c.arch.bank_size = number_as<int>(v); }},
      {"hidden_size", [](ExperimentConfig& c, const Json& v) {
         if (v.is_null() || (v.is_string() && v.get<std::string>() == "none")) {
           c.arch.hidden_size.reset();
         } else {
           c.arch.hidden_size = number_as<int>(v);
         }
       }},
      {"epochs", field(&ExperimentConfig::epochs)},
      {"presentations_per_epoch", field(&ExperimentConfig::presentations_per_epoch)},
      {"presentation_duration", field(&ExperimentConfig::presentation_duration)},
      {"seed", [](ExperimentConfig& c, const Json& v) {
         if (v.is_string()) {
           c.seed = std::stoull(v.get<std::string>());
         } else if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
           c.seed = v.get<std::uint64_t>();
         } else {
           throw ConfigError("expected a non-negative integer");
         }
       }},
      {"init_low", field(&ExperimentConfig::init_low)},
      {"init_high", field(&ExperimentConfig::init_high)},
      {"record_weight_snapshots", [](ExperimentConfig& c, const Json& v) {
         if (!v.is_boolean()) throw ConfigError("expected true or false");
         c.record_weight_snapshots = v.get<bool>();
       }},
      {"v_rest", nested(&ExperimentConfig::lif, &LifParams::v_rest)},
      {"v_threshold", nested(&ExperimentConfig::lif, &LifParams::v_threshold)},
      {"v_reset", nested(&ExperimentConfig::lif, &LifParams::v_reset)},
      {"membrane_resistance", nested(&ExperimentConfig::lif, &LifParams::membrane_resistance)},
      {"membrane_capacitance", nested(&ExperimentConfig::lif, &LifParams::membrane_capacitance)},
      {"dt", nested(&ExperimentConfig::lif, &LifParams::dt)},
      {"a_d", nested(&ExperimentConfig::resume, &ResumeParams::a_d)},
      {"a_di", nested(&ExperimentConfig::resume, &ResumeParams::a_di)},
      {"a_id", nested(&ExperimentConfig::resume, &ResumeParams::a_id)},
      {"tau_learn", nested(&ExperimentConfig::resume, &ResumeParams::tau_learn)},
      {"r_min", nested(&ExperimentConfig::scaling, &ScalingParams::r_min)},
      {"r_max", nested(&ExperimentConfig::scaling, &ScalingParams::r_max)},
      {"f_up", nested(&ExperimentConfig::scaling, &ScalingParams::f_up)},
      {"f_down", nested(&ExperimentConfig::scaling, &ScalingParams::f_down)},
      {"rate_window", nested(&ExperimentConfig::scaling, &ScalingParams::rate_window)},
      {"rate_input", nested(&ExperimentConfig::traingen, &TrainGenParams::rate_input)},
      {"rate_output", nested(&ExperimentConfig::traingen, &TrainGenParams::rate_output)},
      {"min_isi", nested(&ExperimentConfig::traingen, &TrainGenParams::min_isi)},
      {"train_duration", nested(&ExperimentConfig::traingen, &TrainGenParams::duration)},
      {"output_quiet_head", nested(&ExperimentConfig::traingen, &TrainGenParams::output_quiet_head)},
      {"output_spike_count", nested(&ExperimentConfig::traingen, &TrainGenParams::output_spike_count)},
      {"max_attempts", nested(&ExperimentConfig::traingen, &TrainGenParams::max_attempts)},
      {"tau_c", nested(&ExperimentConfig::kernel, &KernelParams::tau_c)},
      {"window", nested(&ExperimentConfig::kernel, &KernelParams::window)},
      {"kernel_dt", nested(&ExperimentConfig::kernel, &KernelParams::dt)},
      {"normalized_distance", [](ExperimentConfig& c, const Json& v) {
         if (!v.is_boolean()) throw ConfigError("expected true or false");
         c.kernel.normalized = v.get<bool>();
       }},
  };
  return table;
}

}  // namespace detail

/// Flat key/value view of a config; keys match those accepted by ConfigBuilder.
inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["op"] = std::string(to_string(c.op));
  j["bank_size"] = c.arch.bank_size;
  j["hidden_size"] = c.arch.hidden_size ? nlohmann::json(*c.arch.hidden_size) : nlohmann::json(nullptr);
  j["epochs"] = c.epochs;
  j["presentations_per_epoch"] = c.presentations_per_epoch;
  j["presentation_duration"] = c.presentation_duration;
  j["seed"] = c.seed;
  j["init_low"] = c.init_low;
  j["init_high"] = c.init_high;
  j["record_weight_snapshots"] = c.record_weight_snapshots;
  j["v_rest"] = c.lif.v_rest;
  j["v_threshold"] = c.lif.v_threshold;
  j["v_reset"] = c.lif.v_reset;
  j["membrane_resistance"] = c.lif.membrane_resistance;
  j["membrane_capacitance"] = c.lif.membrane_capacitance;
  j["dt"] = c.lif.dt;
  j["a_d"] = c.resume.a_d;
  j["a_di"] = c.resume.a_di;
  j["a_id"] = c.resume.a_id;
  j["tau_learn"] = c.resume.tau_learn;
  j["r_min"] = c.scaling.r_min;
  j["r_max"] = c.scaling.r_max;
  j["f_up"] = c.scaling.f_up;
  j["f_down"] = c.scaling.f_down;
  j["rate_window"] = c.scaling.rate_window;
  j["rate_input"] = c.traingen.rate_input;
  j["rate_output"] = c.traingen.rate_output;
  j["min_isi"] = c.traingen.min_isi;
  j["train_duration"] = c.traingen.duration;
  j["output_quiet_head"] = c.traingen.output_quiet_head;
  j["output_spike_count"] = c.traingen.output_spike_count;
  j["max_attempts"] = c.traingen.max_attempts;
  j["tau_c"] = c.kernel.tau_c;
  j["window"] = c.kernel.window;
  j["kernel_dt"] = c.kernel.dt;
  j["normalized_distance"] = c.kernel.normalized;
  return j;
}

/// FNV-1a over the canonical config dump with the seed removed, so runs of
/// one batch (and batches differing only in seed) share a digest.
inline std::string config_digest(const ExperimentConfig& c) {
  auto j = to_json(c);
  j.erase("seed");
  const auto text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Collects settings from a config file, then flag overrides, and resolves
/// them into a validated ExperimentConfig. Later settings win.
class ConfigBuilder {
 public:
  /// Merges a flat JSON object. A run manifest is accepted too: its nested
  /// "config" object is used and its "run_id" remembered.
  void merge_json(const nlohmann::json& j, const std::string& origin = "config") {
    if (!j.is_object()) throw ConfigError(origin + ": expected a JSON object");
    if (j.contains("config")) {
      if (j.contains("run_id")) run_id_ = j.at("run_id").get<std::uint64_t>();
      merge_json(j.at("config"), origin);
      return;
    }
    for (const auto& [key, value] : j.items()) set(key, value);
  }

  void merge_text(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(origin + ": " + e.what());
    }
    merge_json(j, origin);
  }

  /// Accepts `key=value`; the value is read as JSON when possible, else as a string.
  void set_assignment(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ConfigError("--set: expected key=value, got '" + std::string(assignment) + "'");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    auto value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    set(key, value);
  }

  void set(const std::string& key, const nlohmann::json& value) {
    if (!detail::setters().contains(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
  }

  [[nodiscard]] bool has(const std::string& key) const { return values_.contains(key); }
  [[nodiscard]] std::optional<std::uint64_t> run_id() const { return run_id_; }

  /// Applies every collected setting onto the defaults. `op` and `bank_size`
  /// are required; the seed falls back to RESUME_SNN_SEED, then to 1.
  [[nodiscard]] ExperimentConfig resolve() const {
    for (const char* required : {"op", "bank_size"}) {
      if (!values_.contains(required)) throw ConfigError(std::string("missing required config key '") + required + "'");
    }
    ExperimentConfig cfg;
    if (!values_.contains("seed")) {
      if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
        try {
          std::size_t pos = 0;
          cfg.seed = std::stoull(env, &pos);
          if (env[pos] != '\0') throw ConfigError("");
        } catch (const std::exception&) {
          throw ConfigError(std::string(kSeedEnvVar) + ": not an unsigned integer: '" + env + "'");
        }
      }
    }
    for (const auto& [key, value] : values_) {
      try {
        detail::setters().find(key)->second(cfg, value);
      } catch (const ConfigError& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
      } catch (const std::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
      }
    }
    cfg.validate();
    return cfg;
  }

 private:
  std::map<std::string, nlohmann::json> values_;
  std::optional<std::uint64_t> run_id_;
};

}  // namespace resume_snn
