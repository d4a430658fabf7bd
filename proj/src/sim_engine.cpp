#include "coopsched/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coopsched/errors.hpp"

namespace coopsched {

TraceSimulator::TraceSimulator(const WorldParams& world, PolicyKind policy,
                               const PolicyParams& params, TraceSeed seed)
    : env_(world, seed),
      policy_(policy, params, world.perception.m, seed.stream(StreamTag::kPolicy)) {}

TraceRecord TraceSimulator::step() {
  const Slot slot = next_slot_++;
  env_.begin_slot(slot);
  const auto& world = env_.world();
  const auto& perception = world.perception;
  const double omega = env_.omega();

  SlotView view{slot, omega, env_.alive(), {}};
  if (policy_.needs_truth()) {
    truth_.clear();
    for (VehicleId id : view.alive) truth_.push_back(env_.expected_cost(id));
    view.truth = truth_;
  }
  const Decision decision = policy_.decide(view);
  const SlotObservation obs = env_.observe(decision.chosen);

  TraceRecord rec;
  rec.slot = slot;
  rec.time = world.time_of(slot);
  rec.omega = omega;
  rec.chosen = decision.chosen;
  rec.reason = decision.reason;
  rec.exploratory = decision.exploratory;
  rec.link = obs.link;
  rec.comm_latency = obs.comm_latency;
  rec.gain = obs.gain;
  CostSample cost;
  try {
    rec.load = required_load(omega, obs.gain, perception);
    rec.energy = slot_energy(omega, obs.gain, obs.comm_latency, perception, world.channel.tx_power);
    cost = cost_sample(obs.gain, obs.comm_latency, perception);
  } catch (const InfeasibleSlot& e) {
    throw InfeasibleSlot("slot " + std::to_string(slot) + ", vehicle " +
                         std::to_string(to_index(decision.chosen)) + ": " + e.what());
  }
  rec.cost_x = cost.x;
  policy_.update(slot, decision.chosen, cost);
  rec.regret_increment = weighted_regret_increment(env_.expected_cost(decision.chosen),
                                                   env_.best_expected_cost(), omega, perception.m);
  return rec;
}

std::vector<TraceRecord> run_trace(const WorldParams& world, PolicyKind policy,
                                   const PolicyParams& params, TraceSeed seed) {
  TraceSimulator sim(world, policy, params, seed);
  std::vector<TraceRecord> out;
  out.reserve(static_cast<std::size_t>(world.horizon));
  while (!sim.done()) out.push_back(sim.step());
  return out;
}

std::vector<double> regret_curve(std::span<const TraceRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  double acc = 0.0;
  for (const auto& r : records) {
    acc += r.regret_increment;
    out.push_back(acc);
  }
  return out;
}

double BatchSummary::final_window_energy(std::size_t window) const {
  if (mean_energy.empty()) return 0.0;
  window = std::min(window, mean_energy.size());
  double sum = 0.0;
  for (auto it = mean_energy.end() - static_cast<std::ptrdiff_t>(window); it != mean_energy.end();
       ++it) {
    sum += *it;
  }
  return sum / static_cast<double>(window);
}

std::vector<double> trailing_mean(std::span<const double> curve, std::size_t window) {
  if (window <= 1) return {curve.begin(), curve.end()};
  std::vector<double> out(curve.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    sum += curve[i];
    if (i >= window) sum -= curve[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

Slot convergence_slot(std::span<const double> mean_energy) {
  if (mean_energy.empty()) return 0;
  const std::size_t window = std::min<std::size_t>(200, mean_energy.size());
  double final_mean = 0.0;
  for (std::size_t i = mean_energy.size() - window; i < mean_energy.size(); ++i) {
    final_mean += mean_energy[i];
  }
  final_mean /= static_cast<double>(window);
  const auto smooth = trailing_mean(mean_energy, 50);
  for (std::size_t i = smooth.size(); i-- > 0;) {
    if (std::abs(smooth[i] - final_mean) > 0.1 * final_mean) return static_cast<Slot>(i + 1);
  }
  return 0;
}

namespace detail {

BatchAccumulator::BatchAccumulator(Slot horizon)
    : energy(static_cast<std::size_t>(horizon), 0.0),
      regret(static_cast<std::size_t>(horizon), 0.0),
      explore(static_cast<std::size_t>(horizon), 0.0),
      cold_start(static_cast<std::size_t>(horizon), 0.0) {}

void BatchAccumulator::reset() {
  std::fill(energy.begin(), energy.end(), 0.0);
  std::fill(regret.begin(), regret.end(), 0.0);
  std::fill(explore.begin(), explore.end(), 0.0);
  std::fill(cold_start.begin(), cold_start.end(), 0.0);
}

double BatchAccumulator::add_trace(const WorldParams& world, PolicyKind policy,
                                   const PolicyParams& params, TraceSeed seed) {
  TraceSimulator sim(world, policy, params, seed);
  double total = 0.0;
  double cumulative_regret = 0.0;
  while (!sim.done()) {
    const TraceRecord r = sim.step();
    const auto i = static_cast<std::size_t>(r.slot);
    total += r.energy;
    cumulative_regret += r.regret_increment;
    energy[i] += r.energy;
    regret[i] += cumulative_regret;
    if (r.exploratory) explore[i] += 1.0;
    if (r.reason == DecisionReason::kColdStart) cold_start[i] += 1.0;
  }
  return total;
}

void BatchAccumulator::merge(const BatchAccumulator& other) {
  for (std::size_t i = 0; i < energy.size(); ++i) {
    energy[i] += other.energy[i];
    regret[i] += other.regret[i];
    explore[i] += other.explore[i];
    cold_start[i] += other.cold_start[i];
  }
}

BatchSummary finalize(PolicyKind policy, std::uint64_t base_seed, const BatchAccumulator& sums,
                      std::vector<double> trace_energy) {
  BatchSummary s;
  s.policy = policy;
  s.base_seed = base_seed;
  s.n_traces = trace_energy.size();
  const double n = static_cast<double>(s.n_traces);
  auto scaled = [n](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
  };
  s.mean_energy = scaled(sums.energy);
  s.mean_regret = scaled(sums.regret);
  s.explore_rate = scaled(sums.explore);
  s.cold_start_rate = scaled(sums.cold_start);

  double mean = 0.0;
  for (double e : trace_energy) mean += e;
  mean /= n;
  double var = 0.0;
  for (double e : trace_energy) var += (e - mean) * (e - mean);
  s.total_energy_mean = mean;
  s.total_energy_std = s.n_traces > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  s.trace_energy = std::move(trace_energy);
  s.convergence_slot = convergence_slot(s.mean_energy);
  return s;
}

}  // namespace detail

}  // namespace coopsched
