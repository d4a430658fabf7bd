#include "coopsched/perception_model.hpp"

#include <cmath>
#include <string>

#include "coopsched/errors.hpp"

namespace coopsched {

namespace {

constexpr double kGflopPerTflop = 1000.0;

void check_latency(double comm_latency, const PerceptionParams& params) {
  if (!(comm_latency >= 0.0)) {
    throw DomainError("communication latency must be non-negative, got " +
                      std::to_string(comm_latency));
  }
  if (comm_latency >= params.tau) {
    throw InfeasibleSlot("communication latency " + std::to_string(comm_latency) +
                         " s leaves no computation time in a " + std::to_string(params.tau) +
                         " s slot");
  }
}

}  // namespace

std::string_view to_string(LoadInverse mode) noexcept {
  return mode == LoadInverse::kExact ? "exact" : "approximate";
}

LoadInverse load_inverse_from_string(std::string_view name) {
  if (name == "exact") return LoadInverse::kExact;
  if (name == "approximate") return LoadInverse::kApproximate;
  throw ConfigError("perception.load_inverse", "must be \"exact\" or \"approximate\"");
}

void PerceptionParams::validate() const {
  if (!(m > 0.0)) throw ConfigError("perception.m", "must be > 0");
  if (!(n > 0.0)) throw ConfigError("perception.n", "must be > 0");
  if (!(kappa > 0.0)) throw ConfigError("perception.kappa", "must be > 0");
  if (!(tau > 0.0)) throw ConfigError("perception.tau", "must be > 0");
  if (!(r0 > 0.0 && r0 < 100.0)) throw ConfigError("perception.r0", "must lie in (0, 100)");
}

double detection_performance(double load_gflop, double omega, double eta,
                             const PerceptionParams& params) {
  if (!(load_gflop >= 0.0)) {
    throw DomainError("computation load must be non-negative, got " + std::to_string(load_gflop));
  }
  return params.m * std::log1p(params.n * load_gflop) - omega + eta;
}

double required_load(double omega, double eta, const PerceptionParams& params) {
  const double exponent = (params.r0 + omega - eta) / params.m;
  if (params.load_inverse == LoadInverse::kApproximate) {
    return std::exp(exponent) / params.n;
  }
  if (exponent <= 0.0) return 0.0;
  return std::expm1(exponent) / params.n;
}

double computation_energy(double load_gflop, double comp_time, const PerceptionParams& params) {
  if (!(comp_time > 0.0)) {
    throw InfeasibleSlot("computation time must be positive, got " + std::to_string(comp_time));
  }
  const double tflop = load_gflop / kGflopPerTflop;
  return params.kappa * tflop * tflop * tflop / (comp_time * comp_time);
}

double slot_energy(double omega, double eta, double comm_latency, const PerceptionParams& params,
                   double tx_power) {
  check_latency(comm_latency, params);
  const double load = required_load(omega, eta, params);
  return computation_energy(load, params.tau - comm_latency, params) + tx_power * comm_latency;
}

CostSample cost_sample(double eta, double comm_latency, const PerceptionParams& params) {
  check_latency(comm_latency, params);
  const double slack = params.tau - comm_latency;
  return CostSample{
      .x = std::exp(-3.0 * eta / params.m) / (slack * slack),
      .comm_latency = comm_latency,
      .gain = eta,
  };
}

double weighting_factor(double omega, const PerceptionParams& params) {
  return std::exp(3.0 * omega / params.m);
}

double energy_scale(const PerceptionParams& params) {
  const double per_tflop = 1.0 / (params.n * kGflopPerTflop);
  return params.kappa * per_tflop * per_tflop * per_tflop * std::exp(3.0 * params.r0 / params.m);
}

}  // namespace coopsched
