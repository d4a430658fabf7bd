#include <cmath>
#include <random>

#include "doctest.h"

#include "coopsched/errors.hpp"
#include "coopsched/perception_model.hpp"
#include "test_support.hpp"

using namespace coopsched;
using coopsched::testing::close_rel;

TEST_SUITE("perception_model") {

TEST_CASE("detection performance reproduces the fit anchors") {
  const PerceptionParams p;
  CHECK(detection_performance(0.0, 0.0, 0.0, p) == 0.0);
  // Reference values from arbitrary-precision evaluation.
  CHECK(detection_performance(282.0, 0.0, 0.0, p) == doctest::Approx(51.38551671028).epsilon(1e-10));
  CHECK(detection_performance(6.45, 0.0, 0.0, p) == doctest::Approx(33.65215818835).epsilon(1e-10));
  CHECK(detection_performance(100.0, 2.0, 3.0, p) ==
        doctest::Approx(detection_performance(100.0, 0.0, 0.0, p) + 1.0));
  CHECK_THROWS_AS(detection_performance(-1.0, 0.0, 0.0, p), DomainError);
}

TEST_CASE("required load inverts the detection model") {
  PerceptionParams p;
  // Root of g(L) = 55 found numerically (independent of the closed form).
  CHECK(required_load(0.0, 0.0, p) == doctest::Approx(608.973372724159).epsilon(1e-12));
  CHECK(required_load(1.0, p.r0 + 1.0, p) == 0.0);
  CHECK(required_load(0.0, p.r0 + 5.0, p) == 0.0);

  p.load_inverse = LoadInverse::kApproximate;
  CHECK(required_load(0.0, 0.0, p) == doctest::Approx(608.973372724159 + 1.0 / 200.9).epsilon(1e-12));
}

TEST_CASE("round trip holds over random contexts and gains") {
  const PerceptionParams p;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> omega(-5.0, 5.0), eta(0.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double w = omega(rng), e = eta(rng);
    const double ap = detection_performance(required_load(w, e, p), w, e, p);
    REQUIRE(close_rel(ap, p.r0, 1e-9));
  }
}

TEST_CASE("required load is monotone in gain and context") {
  const PerceptionParams p;
  for (double w = -5.0; w <= 5.0; w += 0.5) {
    for (double e = 0.0; e < 10.0; e += 0.25) {
      CHECK(required_load(w, e + 0.25, p) < required_load(w, e, p));
      CHECK(required_load(w + 0.5, e, p) > required_load(w, e, p));
    }
  }
}

TEST_CASE("computation energy follows the DVFS law") {
  const PerceptionParams p;
  CHECK(computation_energy(609.7, 0.05, p) == doctest::Approx(88.845339671816).epsilon(1e-12));
  CHECK(computation_energy(0.0, 0.01, p) == 0.0);
  CHECK(computation_energy(300.0, 0.04, p) ==
        doctest::Approx(4.0 * computation_energy(300.0, 0.08, p)).epsilon(1e-14));
  CHECK_THROWS_AS(computation_energy(300.0, 0.0, p), InfeasibleSlot);
  CHECK_THROWS_AS(computation_energy(300.0, -0.01, p), InfeasibleSlot);
}

TEST_CASE("slot energy") {
  const PerceptionParams p;
  CHECK(slot_energy(2.0, 5.0, 0.0, p, 0.1) == doctest::Approx(13.0184136710753).epsilon(1e-11));
  CHECK(slot_energy(-2.0, 5.0, 0.0, p, 0.1) == doctest::Approx(1.01044597970944).epsilon(1e-11));
  // Transmit energy is added on top of computation.
  const double with_comm = slot_energy(0.0, 2.0, 0.02, p, 0.1);
  CHECK(with_comm ==
        doctest::Approx(computation_energy(required_load(0.0, 2.0, p), 0.03, p) + 0.002).epsilon(1e-14));

  for (double w : {-2.0, 0.0, 2.0}) {
    double prev = slot_energy(w, 0.0, 0.02, p, 0.1);
    for (double e = 0.1; e <= 10.0; e += 0.1) {
      const double cur = slot_energy(w, e, 0.02, p, 0.1);
      CHECK(cur < prev);
      CHECK(std::isfinite(cur));
      CHECK(cur > 0.0);
      prev = cur;
    }
  }
  CHECK_THROWS_AS(slot_energy(0.0, 0.0, p.tau, p, 0.1), InfeasibleSlot);
  CHECK_THROWS_AS(slot_energy(0.0, 0.0, 0.2, p, 0.1), InfeasibleSlot);
  CHECK_THROWS_AS(slot_energy(0.0, 0.0, -0.001, p, 0.1), DomainError);
}

TEST_CASE("cost sample") {
  const PerceptionParams p;
  const auto c0 = cost_sample(0.0, 0.0, p);
  CHECK(c0.x == doctest::Approx(400.0).epsilon(1e-14));
  CHECK(c0.gain == 0.0);
  const auto c = cost_sample(5.0, 0.0154372192729906, p);
  CHECK(c.x == doctest::Approx(34.2973323107515).epsilon(1e-11));
  CHECK(c.comm_latency == 0.0154372192729906);
  CHECK_THROWS_AS(cost_sample(1.0, p.tau, p), InfeasibleSlot);
}

TEST_CASE("computation energy factorizes into scale * weight * cost under the approximate inverse") {
  PerceptionParams p;
  p.load_inverse = LoadInverse::kApproximate;
  // kappa / (1000 n)^3 * exp(3 r0 / m), written out independently.
  const double expected_scale =
      0.98 / std::pow(1000.0 * 200.9, 3) * std::exp(3.0 * 55.0 / 4.695);
  CHECK(energy_scale(p) == doctest::Approx(expected_scale).epsilon(1e-12));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> omega(-5.0, 5.0), eta(0.0, 10.0), tc(0.0, 0.049);
  double first = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double w = omega(rng), e = eta(rng), t = tc(rng);
    const double comp = computation_energy(required_load(w, e, p), p.tau - t, p);
    const double ratio = comp / (weighting_factor(w, p) * cost_sample(e, t, p).x);
    if (i == 0) first = ratio;
    REQUIRE(close_rel(ratio, first, 1e-9));
  }
  CHECK(close_rel(first, energy_scale(p), 1e-9));
}

TEST_CASE("cost normalization bound") {
  const PerceptionParams p;
  const double t_max = 0.0250678099996770;
  const double sqrt_beta = 1.0 / ((p.tau - t_max) * (p.tau - t_max));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> eta(0.0, 12.0), tc(0.0, t_max);
  for (int i = 0; i < 100000; ++i) {
    REQUIRE(cost_sample(eta(rng), tc(rng), p).x / sqrt_beta <= 1.0);
  }
  CHECK(cost_sample(0.0, t_max, p).x / sqrt_beta == doctest::Approx(1.0));
}

TEST_CASE("weighting factor") {
  const PerceptionParams p;
  CHECK(weighting_factor(0.0, p) == 1.0);
  CHECK(weighting_factor(2.0, p) == doctest::Approx(3.58929308755320).epsilon(1e-12));
  CHECK(weighting_factor(-2.0, p) == doctest::Approx(0.278606392848708).epsilon(1e-12));
}

TEST_CASE("parameter validation names the field") {
  auto fails_on = [](PerceptionParams p, const char* field) {
    try {
      p.validate();
    } catch (const ConfigError& e) {
      return e.field() == field;
    }
    return false;
  };
  PerceptionParams p;
  CHECK_NOTHROW(p.validate());
  CHECK(fails_on({.m = 0.0}, "perception.m"));
  CHECK(fails_on({.n = -1.0}, "perception.n"));
  CHECK(fails_on({.kappa = 0.0}, "perception.kappa"));
  CHECK(fails_on({.r0 = 100.0}, "perception.r0"));
  CHECK(fails_on({.r0 = 0.0}, "perception.r0"));
  CHECK(fails_on({.tau = 0.0}, "perception.tau"));
}

}
