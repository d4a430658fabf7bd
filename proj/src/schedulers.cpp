#include "coopsched/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coopsched/errors.hpp"

namespace coopsched {

std::string_view to_string(DecisionReason reason) noexcept {
  switch (reason) {
    case DecisionReason::kColdStart: return "cold_start";
    case DecisionReason::kOptimisticMin: return "optimistic_min";
    case DecisionReason::kGreedy: return "greedy";
    case DecisionReason::kRandom: return "random";
    case DecisionReason::kOracle: return "oracle";
  }
  return "?";
}

std::string_view to_string(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::kAvucb: return "avucb";
    case PolicyKind::kUcb: return "ucb";
    case PolicyKind::kEpsGreedy: return "eps-greedy";
    case PolicyKind::kRandom: return "random";
    case PolicyKind::kOracle: return "oracle";
  }
  return "?";
}

PolicyKind policy_from_string(std::string_view name) {
  for (PolicyKind k : kAllPolicies) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("policy.name", "must be one of avucb, ucb, eps-greedy, random, oracle, all");
}

namespace {

void require_alive(std::span<const VehicleId> alive) {
  if (alive.empty()) throw SchedulingError("empty alive set");
}

// Lowest alive id without statistics, if any. `alive` is ascending.
const VehicleId* first_unseen(const ArmTable& stats, std::span<const VehicleId> alive) {
  for (const auto& id : alive) {
    if (!stats.find(id)) return &id;
  }
  return nullptr;
}

VehicleId greedy_arm(const ArmTable& stats, std::span<const VehicleId> alive) {
  VehicleId best = alive.front();
  double best_mean = std::numeric_limits<double>::infinity();
  for (VehicleId id : alive) {
    const double m = stats.find(id)->mean_cost;
    if (m < best_mean) {
      best_mean = m;
      best = id;
    }
  }
  return best;
}

Decision optimistic_decide(const ArmTable& stats, std::span<const VehicleId> alive, Slot slot,
                           double beta, double exploration, bool select_by_mean) {
  require_alive(alive);
  if (const VehicleId* fresh = first_unseen(stats, alive)) {
    return {*fresh, DecisionReason::kColdStart, false};
  }
  const VehicleId greedy = greedy_arm(stats, alive);
  if (select_by_mean) return {greedy, DecisionReason::kGreedy, false};

  VehicleId best = alive.front();
  double best_cost = std::numeric_limits<double>::infinity();
  for (VehicleId id : alive) {
    const ArmStats& s = *stats.find(id);
    const double age = static_cast<double>(std::max<Slot>(slot - s.first_seen, 1));
    const double bonus =
        std::sqrt(2.0 * beta * exploration * std::log(age) / static_cast<double>(s.pulls));
    const double optimistic = s.mean_cost - bonus;
    if (optimistic < best_cost) {
      best_cost = optimistic;
      best = id;
    }
  }
  const auto reason = exploration > 0.0 ? DecisionReason::kOptimisticMin : DecisionReason::kGreedy;
  return {best, reason, best != greedy};
}

}  // namespace

double normalized_weight(double omega, const AvucbParams& params) {
  const double a = 3.0 / params.m;
  const double low = std::exp(a * params.omega_low);
  const double high = std::exp(a * params.omega_high);
  return std::clamp((std::exp(a * omega) - low) / (high - low), 0.0, 1.0);
}

Decision avucb_decide(const ArmTable& stats, std::span<const VehicleId> alive, double omega,
                      Slot slot, const AvucbParams& params) {
  const double exploration = 1.0 - normalized_weight(omega, params);
  return optimistic_decide(stats, alive, slot, params.beta, exploration, params.select_by_mean);
}

Decision ucb_decide(const ArmTable& stats, std::span<const VehicleId> alive, Slot slot,
                    const AvucbParams& params) {
  return optimistic_decide(stats, alive, slot, params.beta, 1.0, params.select_by_mean);
}

void avucb_update(ArmTable& stats, VehicleId chosen, Slot slot, const CostSample& cost) {
  ArmStats& s = stats.slot_for(chosen);
  if (!s.initialized()) {
    s = ArmStats{cost.x, 1, slot};
    return;
  }
  const double k = static_cast<double>(s.pulls);
  s.mean_cost = (s.mean_cost * k + cost.x) / (k + 1.0);
  ++s.pulls;
}

Decision eps_greedy_decide(const ArmTable& stats, std::span<const VehicleId> alive,
                           double epsilon, Rng& rng) {
  require_alive(alive);
  if (const VehicleId* fresh = first_unseen(stats, alive)) {
    return {*fresh, DecisionReason::kColdStart, false};
  }
  const VehicleId greedy = greedy_arm(stats, alive);
  std::bernoulli_distribution explore(epsilon);
  if (explore(rng)) {
    std::uniform_int_distribution<std::size_t> pick(0, alive.size() - 1);
    const VehicleId id = alive[pick(rng)];
    return {id, DecisionReason::kRandom, id != greedy};
  }
  return {greedy, DecisionReason::kGreedy, false};
}

Decision random_decide(std::span<const VehicleId> alive, Rng& rng) {
  require_alive(alive);
  std::uniform_int_distribution<std::size_t> pick(0, alive.size() - 1);
  return {alive[pick(rng)], DecisionReason::kRandom, false};
}

Decision oracle_decide(std::span<const double> expected_cost, std::span<const VehicleId> alive) {
  require_alive(alive);
  if (expected_cost.size() != alive.size()) {
    throw SchedulingError("oracle needs one expected cost per alive vehicle");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < alive.size(); ++i) {
    if (expected_cost[i] < expected_cost[best]) best = i;
  }
  return {alive[best], DecisionReason::kOracle, false};
}

double weighted_regret_increment(double chosen_mean, double best_mean, double omega, double m) {
  return std::exp(3.0 * omega / m) * (chosen_mean - best_mean);
}

// ---------------------------------------------------------------------------

Policy::Policy(PolicyKind kind, const PolicyParams& params, double m, Rng rng)
    : kind_(kind),
      params_(params),
      avucb_{params.beta, params.omega_low, params.omega_high, m, params.select_by_mean},
      rng_(std::move(rng)) {}

Decision Policy::decide(const SlotView& view) {
  switch (kind_) {
    case PolicyKind::kAvucb:
      return avucb_decide(stats_, view.alive, view.omega, view.slot, avucb_);
    case PolicyKind::kUcb:
      return ucb_decide(stats_, view.alive, view.slot, avucb_);
    case PolicyKind::kEpsGreedy:
      return eps_greedy_decide(stats_, view.alive, params_.epsilon, rng_);
    case PolicyKind::kRandom:
      return random_decide(view.alive, rng_);
    case PolicyKind::kOracle:
      return oracle_decide(view.truth, view.alive);
  }
  throw SchedulingError("unknown policy");
}

void Policy::update(Slot slot, VehicleId chosen, const CostSample& cost) {
  avucb_update(stats_, chosen, slot, cost);
}

}  // namespace coopsched
