#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "coopsched/schedulers.hpp"
#include "coopsched/traffic_env.hpp"

namespace coopsched {

inline constexpr int kConfigSchemaVersion = 1;

/// Channel section as written in the file (dB / dBm). Converted to linear once in world().
struct ChannelConfig {
  double tx_power_w = 0.1;
  double bandwidth_hz = 10e6;
  double payload_bits = 2e6;
  double noise_power_dbm = -104.0;
  double gain_los_db = -85.0;
  double gain_nlos_db = -100.0;
  double mean_dwell_s = 1.0;

  ChannelParams to_params() const;
  bool operator==(const ChannelConfig&) const = default;
};

struct PolicyConfig {
  std::string name = "all";
  std::optional<double> beta;  // unset: sqrt(beta) = 1 / (tau - T_comm_max)^2
  double epsilon = 0.1;
  double omega_low = -2.0;
  double omega_high = 2.0;
  bool select_by_mean = false;

  bool operator==(const PolicyConfig&) const = default;
};

struct RunConfig {
  std::size_t traces = 2000;
  std::uint64_t base_seed = 1;
  int workers = 0;  // 0 = all available threads

  bool operator==(const RunConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "results";
  std::size_t dump_traces = 0;
  std::size_t smooth_window = 0;

  bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
  std::string preset = "stationary";
  Slot horizon = 1200;
  PerceptionParams perception;
  ChannelConfig channel;
  ContextParams context;
  PopulationParams population;
  std::vector<ScriptedEvent> events;
  PolicyConfig policy;
  RunConfig run;
  OutputConfig output;

  WorldParams world() const;
  // Policies selected by policy.name ("all" expands to every policy).
  std::vector<PolicyKind> policies() const;
  PolicyParams policy_params() const;
  // sqrt(beta) = 1 / (tau - T_comm_max)^2.
  double default_beta() const;

  /// Every module invariant, including T_comm_max < tau and a non-empty alive set over the
  /// horizon. Throws ConfigError naming the field.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Layers applied on top of the file: preset selection and dotted-path assignments
/// such as {"channel.payload_bits", "16e6"}.
struct ConfigOverrides {
  std::optional<std::string> preset;
  std::vector<std::pair<std::string, std::string>> sets;
};

std::vector<std::string> preset_names();

nlohmann::json to_json(const ScenarioConfig& config);

// Strict: unknown fields and wrong types raise ConfigError. Missing fields keep defaults.
ScenarioConfig from_json(const nlohmann::json& j);

// defaults < preset < file < overrides, then validate(). Accepts a manifest.json in place of a
// config (its embedded "config" is used). An empty file yields the defaults.
ScenarioConfig load_config_text(std::string_view text, const ConfigOverrides& overrides = {});
ScenarioConfig load_config(const std::optional<std::filesystem::path>& path,
                           const ConfigOverrides& overrides = {});

// Hex FNV-1a of the canonical JSON, excluding output paths and worker count.
std::string config_hash(const ScenarioConfig& config);
// As config_hash, additionally excluding the policy section.
std::string scenario_hash(const ScenarioConfig& config);

}  // namespace coopsched
