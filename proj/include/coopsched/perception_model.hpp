#pragma once

#include <string_view>

namespace coopsched {

// How the required computation load is obtained from the AP requirement.
//   exact:       L = (exp((r0 + omega - eta) / m) - 1) / n, clamped at 0
//   approximate: L = exp((r0 + omega - eta) / m) / n
enum class LoadInverse { kExact, kApproximate };

std::string_view to_string(LoadInverse mode) noexcept;
LoadInverse load_inverse_from_string(std::string_view name);

/// Detection model and DVFS energy parameters.
///
/// Loads are in GFLOP; kappa is per TFLOP^3 and the conversion happens inside
/// computation_energy. AP quantities (r0, omega, eta) are in AP points.
struct PerceptionParams {
  double m = 4.695;      // AP per unit of ln-load
  double n = 200.9;      // per GFLOP
  double kappa = 0.98;   // W s^2 TFLOP^-3
  double r0 = 55.0;      // minimum AP
  double tau = 0.05;     // slot length, s
  LoadInverse load_inverse = LoadInverse::kExact;

  /// Throws ConfigError naming the field on violation.
  void validate() const;

  bool operator==(const PerceptionParams&) const = default;
};

/// Realized bandit cost of one request plus the observation it came from.
struct CostSample {
  double x = 0.0;             // exp(-3 eta / m) / (tau - comm_latency)^2, s^-2
  double comm_latency = 0.0;  // s
  double gain = 0.0;          // AP points
};

// AP = m ln(1 + n load) - omega + eta.
double detection_performance(double load_gflop, double omega, double eta,
                             const PerceptionParams& params);

// Smallest load meeting r0 for the given context and gain.
double required_load(double omega, double eta, const PerceptionParams& params);

// kappa (load / 1000)^3 / comp_time^2, in joules. Throws InfeasibleSlot for comp_time <= 0.
double computation_energy(double load_gflop, double comp_time, const PerceptionParams& params);

// Computation at minimum frequency in the time left after transmission, plus transmit energy.
double slot_energy(double omega, double eta, double comm_latency, const PerceptionParams& params,
                   double tx_power);

CostSample cost_sample(double eta, double comm_latency, const PerceptionParams& params);

// W = exp(3 omega / m).
double weighting_factor(double omega, const PerceptionParams& params);

// Constant relating cost to computation energy under the approximate inverse:
// E_comp = energy_scale * W * x.
double energy_scale(const PerceptionParams& params);

}  // namespace coopsched
