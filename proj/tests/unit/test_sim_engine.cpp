#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "coopsched/channel_model.hpp"
#include "coopsched/errors.hpp"
#include "coopsched/sim_engine.hpp"
#include "test_support.hpp"

using namespace coopsched;
using coopsched::testing::default_policy;
using coopsched::testing::default_world;
using coopsched::testing::dynamic_world;

TEST_SUITE("sim_engine") {

TEST_CASE("a trace covers the horizon slot by slot") {
  const auto world = default_world();
  const auto records = run_trace(world, PolicyKind::kAvucb, default_policy(), TraceSeed{1, 0});
  REQUIRE(records.size() == 1200);
  for (std::size_t i = 0; i < records.size(); ++i) REQUIRE(records[i].slot == static_cast<Slot>(i));
  CHECK(records.back().time == doctest::Approx(59.95));
}

TEST_CASE("runs are deterministic given the seed") {
  const auto world = default_world();
  for (PolicyKind k : kAllPolicies) {
    const auto a = run_trace(world, k, default_policy(), TraceSeed{3, 7});
    const auto b = run_trace(world, k, default_policy(), TraceSeed{3, 7});
    CHECK(a == b);
    const auto c = run_trace(world, k, default_policy(), TraceSeed{3, 8});
    CHECK_FALSE(a == c);
  }
}

TEST_CASE("slot energy is computation plus transmission") {
  const auto world = default_world();
  const auto records = run_trace(world, PolicyKind::kEpsGreedy, default_policy(), TraceSeed{2, 0});
  for (const auto& r : records) {
    const double comp =
        computation_energy(r.load, world.perception.tau - r.comm_latency, world.perception);
    const double expected = comp + comm_energy(r.comm_latency, world.channel);
    REQUIRE(std::abs(r.energy - expected) <= 1e-12 * expected);
    REQUIRE(r.comm_latency == world.channel.latency(r.link));
  }
}

TEST_CASE("a single vehicle gives zero regret and the oracle's energy") {
  auto world = default_world();
  world.population.initial_count = 1;
  const auto avucb = run_trace(world, PolicyKind::kAvucb, default_policy(), TraceSeed{4, 0});
  const auto oracle = run_trace(world, PolicyKind::kOracle, default_policy(), TraceSeed{4, 0});
  REQUIRE(avucb.size() == oracle.size());
  for (std::size_t i = 0; i < avucb.size(); ++i) {
    REQUIRE(avucb[i].regret_increment == 0.0);
    REQUIRE(avucb[i].energy == oracle[i].energy);
  }
  CHECK(avucb.front().reason == DecisionReason::kColdStart);
}

TEST_CASE("oracle regret is identically zero") {
  const auto records = run_trace(dynamic_world(), PolicyKind::kOracle, default_policy(), TraceSeed{5, 0});
  for (double r : regret_curve(records)) REQUIRE(r == 0.0);
}

TEST_CASE("regret curves are non-decreasing") {
  for (PolicyKind k : {PolicyKind::kAvucb, PolicyKind::kUcb, PolicyKind::kRandom}) {
    const auto curve = regret_curve(run_trace(default_world(), k, default_policy(), TraceSeed{6, 0}));
    for (std::size_t i = 1; i < curve.size(); ++i) REQUIRE(curve[i] >= curve[i - 1]);
  }
}

TEST_CASE("every vehicle is cold-started once, before any optimistic pull") {
  const auto records = run_trace(default_world(), PolicyKind::kAvucb, default_policy(), TraceSeed{7, 0});
  for (std::uint32_t i = 0; i < 10; ++i) {
    CHECK(records[i].reason == DecisionReason::kColdStart);
    CHECK(records[i].chosen == VehicleId{i});
  }
  for (std::size_t i = 10; i < records.size(); ++i) REQUIRE(records[i].reason != DecisionReason::kColdStart);
}

TEST_CASE("a relabeled vehicle is cold-started exactly once") {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto records = run_trace(dynamic_world(), PolicyKind::kAvucb, default_policy(), TraceSeed{8, t});
    int cold_new = 0;
    Slot first_pull = -1;
    for (const auto& r : records) {
      if (r.chosen != VehicleId{10}) continue;
      if (first_pull < 0) first_pull = r.slot;
      cold_new += r.reason == DecisionReason::kColdStart;
    }
    CHECK(first_pull == 200);
    CHECK(cold_new == 1);
  }
}

TEST_CASE("AVUCB and UCB coincide when every context is at the low bound") {
  auto world = default_world();
  world.context.omega_complex = -2.0;
  const auto a = run_trace(world, PolicyKind::kAvucb, default_policy(), TraceSeed{9, 0});
  const auto u = run_trace(world, PolicyKind::kUcb, default_policy(), TraceSeed{9, 0});
  REQUIRE(a.size() == u.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].chosen == u[i].chosen);
    REQUIRE(a[i].energy == u[i].energy);
  }
}

TEST_CASE("AVUCB is greedy when every context is at the high bound") {
  auto world = default_world();
  world.context.omega_simple = 2.0;
  const auto records = run_trace(world, PolicyKind::kAvucb, default_policy(), TraceSeed{10, 0});
  for (std::size_t i = 10; i < records.size(); ++i) {
    REQUIRE(records[i].reason == DecisionReason::kGreedy);
    REQUIRE_FALSE(records[i].exploratory);
  }
}

TEST_CASE("an infeasible slot aborts with its location") {
  auto world = default_world();
  world.perception.tau = 0.02;  // shorter than the NLoS latency; bypasses config validation
  try {
    run_trace(world, PolicyKind::kRandom, default_policy(), TraceSeed{1, 0});
    FAIL("expected InfeasibleSlot");
  } catch (const InfeasibleSlot& e) {
    CHECK(std::string(e.what()).find("slot ") == 0);
  }
}

TEST_CASE("a batch of one trace matches the trace") {
  const auto world = default_world();
  const auto records = run_trace(world, PolicyKind::kAvucb, default_policy(), TraceSeed{11, 0});
  const auto batch = run_batch(world, PolicyKind::kAvucb, default_policy(), 1, 11);
  REQUIRE(batch.horizon() == 1200);
  const auto regret = regret_curve(records);
  double total = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    REQUIRE(batch.mean_energy[i] == records[i].energy);
    REQUIRE(batch.mean_regret[i] == regret[i]);
    REQUIRE(batch.explore_rate[i] == (records[i].exploratory ? 1.0 : 0.0));
    total += records[i].energy;
  }
  CHECK(batch.trace_energy.size() == 1);
  CHECK(batch.trace_energy[0] == doctest::Approx(total).epsilon(1e-14));
  CHECK(batch.total_energy_std == 0.0);
}

TEST_CASE("parallel batch matches the serial reference") {
  auto world = default_world();
  world.horizon = 300;
  const auto params = default_policy();
  const auto serial = run_batch_serial(world, PolicyKind::kAvucb, params, 600, 21);
  const auto parallel = run_batch(world, PolicyKind::kAvucb, params, 600, 21, 4);
  REQUIRE(serial.trace_energy == parallel.trace_energy);
  for (std::size_t i = 0; i < serial.mean_energy.size(); ++i) {
    REQUIRE(coopsched::testing::close_rel(serial.mean_energy[i], parallel.mean_energy[i], 1e-9));
    REQUIRE(coopsched::testing::close_rel(serial.mean_regret[i], parallel.mean_regret[i], 1e-9));
    REQUIRE(serial.explore_rate[i] == doctest::Approx(parallel.explore_rate[i]).epsilon(1e-12));
  }
  CHECK(coopsched::testing::close_rel(serial.total_energy_mean, parallel.total_energy_mean, 1e-9));
  CHECK(coopsched::testing::close_rel(serial.total_energy_std, parallel.total_energy_std, 1e-9));
}

TEST_CASE("batch results are bit-identical across worker counts") {
  auto world = default_world();
  world.horizon = 200;
  const auto params = default_policy();
  const auto one = run_batch(world, PolicyKind::kUcb, params, 1100, 5, 1);
  const auto eight = run_batch(world, PolicyKind::kUcb, params, 1100, 5, 8);
  CHECK(one.mean_energy == eight.mean_energy);
  CHECK(one.mean_regret == eight.mean_regret);
  CHECK(one.explore_rate == eight.explore_rate);
  CHECK(one.trace_energy == eight.trace_energy);
  CHECK(one.total_energy_mean == eight.total_energy_mean);
  CHECK(one.total_energy_std == eight.total_energy_std);
  CHECK(one.convergence_slot == eight.convergence_slot);
}

TEST_CASE("random-policy energy matches an independent Monte Carlo") {
  const auto world = default_world();
  const auto batch = run_batch(world, PolicyKind::kRandom, default_policy(), 2000, 31);
  double sim = 0.0;
  for (double e : batch.mean_energy) sim += e;
  sim /= static_cast<double>(batch.mean_energy.size());

  // Direct sampling of the stationary slot: context, gain mean, gain, link.
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0), eta_avg(0.0, 5.0);
  std::normal_distribution<double> z(0.0, 2.0);
  const double m = 4.695, n = 200.9, kappa = 0.98, r0 = 55.0, tau = 0.05, p = 0.1;
  const double t_los = 2e6 / (10e6 * std::log2(1.0 + 0.1 * std::pow(10.0, -8.5) / std::pow(10.0, -13.4)));
  const double t_nlos = 2e6 / (10e6 * std::log2(1.0 + 0.1 * 1e-10 / std::pow(10.0, -13.4)));
  const int samples = 2000000;
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double omega = u(rng) < 1.0 / 3.0 ? 2.0 : -2.0;
    const double eta = std::max(0.0, eta_avg(rng) + z(rng));
    const double tc = u(rng) < 0.5 ? t_los : t_nlos;
    const double load = std::max(0.0, std::expm1((r0 + omega - eta) / m) / n);
    acc += kappa * std::pow(load / 1000.0, 3) / ((tau - tc) * (tau - tc)) + p * tc;
  }
  const double mc = acc / samples;
  CHECK(std::abs(sim / mc - 1.0) < 0.03);
}

TEST_CASE("smoothing and convergence helpers") {
  const std::vector<double> curve{1, 2, 3, 4};
  CHECK(trailing_mean(curve, 1) == curve);
  CHECK(trailing_mean(curve, 2) == std::vector<double>{1.0, 1.5, 2.5, 3.5});

  std::vector<double> flat(500, 10.0);
  CHECK(convergence_slot(flat) == 0);
  for (std::size_t i = 0; i < 100; ++i) flat[i] = 100.0;
  // Trailing window of 50 still sees a 100 through slot 148.
  CHECK(convergence_slot(flat) > 100);
  CHECK(convergence_slot(flat) <= 150);
}

}
