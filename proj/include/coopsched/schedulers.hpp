#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "coopsched/perception_model.hpp"
#include "coopsched/rng.hpp"
#include "coopsched/traffic_env.hpp"

namespace coopsched {

/// Per-vehicle learning state. pulls == 0 means the vehicle has never been requested.
struct ArmStats {
  double mean_cost = 0.0;  // running mean of X, s^-2
  std::int64_t pulls = 0;
  Slot first_seen = 0;

  bool initialized() const noexcept { return pulls > 0; }
  bool operator==(const ArmStats&) const = default;
};

/// Dense id -> ArmStats map. Ids are assigned sequentially per trace, so a vector suffices.
class ArmTable {
 public:
  const ArmStats* find(VehicleId id) const noexcept {
    const auto i = to_index(id);
    return i < arms_.size() && arms_[i].initialized() ? &arms_[i] : nullptr;
  }
  ArmStats& slot_for(VehicleId id) {
    const auto i = to_index(id);
    if (i >= arms_.size()) arms_.resize(i + 1);
    return arms_[i];
  }
  std::size_t capacity() const noexcept { return arms_.size(); }

  bool operator==(const ArmTable&) const = default;

 private:
  std::vector<ArmStats> arms_;
};

struct AvucbParams {
  double beta = 0.0;
  double omega_low = -2.0;
  double omega_high = 2.0;
  double m = 4.695;
  // Ablation: choose by plain running mean instead of the optimistic cost.
  bool select_by_mean = false;
};

enum class DecisionReason { kColdStart, kOptimisticMin, kGreedy, kRandom, kOracle };

std::string_view to_string(DecisionReason reason) noexcept;

struct Decision {
  VehicleId chosen{};
  DecisionReason reason = DecisionReason::kColdStart;
  // Chosen arm differs from the argmin of running means (learning policies only).
  bool exploratory = false;
};

// Clamp((W - W_L) / (W_H - W_L), 0, 1) with W = exp(3 omega / m).
double normalized_weight(double omega, const AvucbParams& params);

// Adaptive volatile UCB: cold-starts unseen vehicles (lowest id first), then minimizes
//   mean - sqrt(2 beta (1 - W~) log(max(slot - first_seen, 1)) / pulls).
Decision avucb_decide(const ArmTable& stats, std::span<const VehicleId> alive, double omega,
                      Slot slot, const AvucbParams& params);

// Context-blind UCB: the same rule with (1 - W~) replaced by 1.
Decision ucb_decide(const ArmTable& stats, std::span<const VehicleId> alive, Slot slot,
                    const AvucbParams& params);

// Cold start on first pull, running-mean update afterwards.
void avucb_update(ArmTable& stats, VehicleId chosen, Slot slot, const CostSample& cost);

Decision eps_greedy_decide(const ArmTable& stats, std::span<const VehicleId> alive,
                           double epsilon, Rng& rng);

Decision random_decide(std::span<const VehicleId> alive, Rng& rng);

// Argmin of true expected cost; expected_cost[i] belongs to alive[i].
Decision oracle_decide(std::span<const double> expected_cost, std::span<const VehicleId> alive);

// W (chosen_mean - best_mean).
double weighted_regret_increment(double chosen_mean, double best_mean, double omega, double m);

// ---------------------------------------------------------------------------

enum class PolicyKind { kAvucb, kUcb, kEpsGreedy, kRandom, kOracle };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::kAvucb, PolicyKind::kUcb,
                                              PolicyKind::kEpsGreedy, PolicyKind::kRandom,
                                              PolicyKind::kOracle};

std::string_view to_string(PolicyKind kind) noexcept;
PolicyKind policy_from_string(std::string_view name);

struct PolicyParams {
  double beta = 0.0;
  double epsilon = 0.1;
  double omega_low = -2.0;
  double omega_high = 2.0;
  bool select_by_mean = false;
};

/// What a policy may see at the start of a slot. `truth` is filled only for the oracle.
struct SlotView {
  Slot slot = 0;
  double omega = 0.0;
  std::span<const VehicleId> alive;
  std::span<const double> truth;
};

/// One policy instance, owned by one trace.
class Policy {
 public:
  Policy(PolicyKind kind, const PolicyParams& params, double m, Rng rng);

  PolicyKind kind() const noexcept { return kind_; }
  bool needs_truth() const noexcept { return kind_ == PolicyKind::kOracle; }

  Decision decide(const SlotView& view);
  void update(Slot slot, VehicleId chosen, const CostSample& cost);

  const ArmTable& stats() const noexcept { return stats_; }

 private:
  PolicyKind kind_;
  PolicyParams params_;
  AvucbParams avucb_;
  Rng rng_;
  ArmTable stats_;
};

}  // namespace coopsched
