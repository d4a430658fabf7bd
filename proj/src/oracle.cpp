#include "coopsched/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace coopsched {

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double expected_gain_factor(double eta_avg, double eta_sigma, const PerceptionParams& perception) {
  const double a = 3.0 / perception.m;
  if (eta_sigma <= 0.0) return std::exp(-a * std::max(0.0, eta_avg));
  // Mass clamped to eta = 0 contributes exp(0) = 1; the positive part is a shifted
  // Gaussian MGF restricted to eta > 0.
  const double clamped = std_normal_cdf(-eta_avg / eta_sigma);
  const double tail = std::exp(-a * eta_avg + 0.5 * a * a * eta_sigma * eta_sigma) *
                      std_normal_cdf(eta_avg / eta_sigma - a * eta_sigma);
  return clamped + tail;
}

double expected_channel_factor(const ChannelParams& channel, const PerceptionParams& perception) {
  const double p_los = channel.los_probability();
  const double slack_los = perception.tau - channel.latency(LinkState::kLos);
  const double slack_nlos = perception.tau - channel.latency(LinkState::kNlos);
  return p_los / (slack_los * slack_los) + (1.0 - p_los) / (slack_nlos * slack_nlos);
}

double expected_cost(double eta_avg, double eta_sigma, const ChannelParams& channel,
                     const PerceptionParams& perception) {
  return expected_gain_factor(eta_avg, eta_sigma, perception) *
         expected_channel_factor(channel, perception);
}

}  // namespace coopsched
