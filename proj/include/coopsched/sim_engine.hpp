#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "coopsched/schedulers.hpp"
#include "coopsched/traffic_env.hpp"

namespace coopsched {

/// One slot of one trace.
struct TraceRecord {
  Slot slot = 0;
  double time = 0.0;   // s
  double omega = 0.0;  // AP points
  VehicleId chosen{};
  DecisionReason reason = DecisionReason::kColdStart;
  bool exploratory = false;
  LinkState link = LinkState::kLos;
  double comm_latency = 0.0;      // s
  double gain = 0.0;              // AP points
  double load = 0.0;              // GFLOP
  double energy = 0.0;            // J
  double cost_x = 0.0;            // s^-2
  double regret_increment = 0.0;  // weighted excess expected cost, s^-2

  bool operator==(const TraceRecord&) const = default;
};

/// Steps one trace slot by slot: context and channels advance, the policy sees omega and the
/// alive set, only the chosen vehicle is observed, and the policy learns from its cost.
class TraceSimulator {
 public:
  TraceSimulator(const WorldParams& world, PolicyKind policy, const PolicyParams& params,
                 TraceSeed seed);

  bool done() const noexcept { return next_slot_ >= env_.world().horizon; }
  TraceRecord step();

  const Environment& environment() const noexcept { return env_; }
  const Policy& policy() const noexcept { return policy_; }

 private:
  Environment env_;
  Policy policy_;
  std::vector<double> truth_;
  Slot next_slot_ = 0;
};

std::vector<TraceRecord> run_trace(const WorldParams& world, PolicyKind policy,
                                   const PolicyParams& params, TraceSeed seed);

// Prefix sums of regret_increment.
std::vector<double> regret_curve(std::span<const TraceRecord> records);

/// Across-trace aggregate of one policy. Curves have one entry per slot.
struct BatchSummary {
  PolicyKind policy = PolicyKind::kAvucb;
  std::size_t n_traces = 0;
  std::uint64_t base_seed = 0;
  std::vector<double> mean_energy;      // J per slot
  std::vector<double> mean_regret;      // cumulative
  std::vector<double> explore_rate;     // fraction of traces with an exploratory pull
  std::vector<double> cold_start_rate;  // fraction of traces with a cold-start pull
  std::vector<double> trace_energy;     // total energy of each trace, by trace index
  double total_energy_mean = 0.0;
  double total_energy_std = 0.0;
  Slot convergence_slot = 0;

  Slot horizon() const noexcept { return static_cast<Slot>(mean_energy.size()); }
  // Mean per-slot energy over the last `window` slots.
  double final_window_energy(std::size_t window = 200) const;
};

// Trace i uses TraceSeed{base_seed, i}. Results do not depend on `workers` (0 = all threads).
BatchSummary run_batch(const WorldParams& world, PolicyKind policy, const PolicyParams& params,
                       std::size_t n_traces, std::uint64_t base_seed, int workers = 0);

// Single-threaded reference: plain trace-order accumulation.
BatchSummary run_batch_serial(const WorldParams& world, PolicyKind policy,
                              const PolicyParams& params, std::size_t n_traces,
                              std::uint64_t base_seed);

// Trailing moving average; window <= 1 returns the input.
std::vector<double> trailing_mean(std::span<const double> curve, std::size_t window);

// First slot after which the 50-slot trailing mean stays within 10% of the final-window mean.
Slot convergence_slot(std::span<const double> mean_energy);

namespace detail {

/// Per-slot sums over a set of traces.
struct BatchAccumulator {
  std::vector<double> energy;
  std::vector<double> regret;
  std::vector<double> explore;
  std::vector<double> cold_start;

  explicit BatchAccumulator(Slot horizon = 0);
  void reset();
  // Simulates one trace and adds it; returns its total energy.
  double add_trace(const WorldParams& world, PolicyKind policy, const PolicyParams& params,
                   TraceSeed seed);
  void merge(const BatchAccumulator& other);
};

BatchSummary finalize(PolicyKind policy, std::uint64_t base_seed, const BatchAccumulator& sums,
                      std::vector<double> trace_energy);

}  // namespace detail

}  // namespace coopsched
