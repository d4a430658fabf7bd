#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "coopsched/config.hpp"
#include "coopsched/sim_engine.hpp"

namespace coopsched {

inline constexpr int kOutputSchemaVersion = 1;

struct ExperimentResult {
  ScenarioConfig config;
  std::vector<BatchSummary> summaries;  // one per policy, in config.policies() order
};

// Runs every selected policy on the same environment seeds.
ExperimentResult simulate(const ScenarioConfig& config);

// Runs and writes summary.json, energy_curve.csv, regret_curve.csv, manifest.json (and
// traces_<policy>.csv when output.dump_traces > 0) into `out_dir`.
ExperimentResult run_experiment(const ScenarioConfig& config, const std::filesystem::path& out_dir);

// CSV with a "# schema" line, a header and one row per slot. Columns are per policy.
void write_energy_csv(std::ostream& os, const ExperimentResult& result);
void write_regret_csv(std::ostream& os, const ExperimentResult& result);
void write_traces_csv(std::ostream& os, const ScenarioConfig& config, PolicyKind policy,
                      std::size_t n_traces);

nlohmann::json summary_json(const ExperimentResult& result);
nlohmann::json manifest_json(const ScenarioConfig& config);
nlohmann::json timeline_json(const EpochTimeline& timeline, const WorldParams& world);

/// Scalar digest of one policy's batch, as stored in summary.json.
struct SummaryDigest {
  std::string policy;
  std::string scenario_hash;
  std::size_t n_traces = 0;
  double total_energy_mean = 0.0;
  double total_energy_std = 0.0;
  Slot convergence_slot = 0;
  double final_window_energy = 0.0;
};

SummaryDigest digest(const BatchSummary& summary, const ScenarioConfig& config);
std::vector<SummaryDigest> digests_from_summary_json(const nlohmann::json& j);

struct ComparisonRow {
  std::string policy;
  double total_energy_mean = 0.0;
  double total_energy_std = 0.0;
  std::optional<double> savings;  // 1 - E / E_baseline; unset without a baseline row
  Slot convergence_slot = 0;
  double final_window_energy = 0.0;
};

// Throws ConfigError when the digests come from different scenarios.
std::vector<ComparisonRow> compare_policies(std::span<const SummaryDigest> digests,
                                            const std::string& baseline = "random");

void print_comparison(std::ostream& os, std::span<const ComparisonRow> rows);

}  // namespace coopsched
