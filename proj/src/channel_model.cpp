#include "coopsched/channel_model.hpp"

#include <cmath>
#include <string>

#include "coopsched/errors.hpp"

namespace coopsched {

std::string_view to_string(LinkState state) noexcept {
  return state == LinkState::kLos ? "los" : "nlos";
}

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

double ChannelParams::latency(LinkState state) const {
  return comm_latency(state == LinkState::kLos ? gain_los : gain_nlos, *this);
}

void ChannelParams::validate(double tau) const {
  if (!(tx_power > 0.0)) throw ConfigError("channel.tx_power_w", "must be > 0");
  if (!(bandwidth > 0.0)) throw ConfigError("channel.bandwidth_hz", "must be > 0");
  if (!(payload_bits > 0.0)) throw ConfigError("channel.payload_bits", "must be > 0");
  if (!(noise_power > 0.0)) throw ConfigError("channel.noise_power_dbm", "must be finite");
  if (!(gain_nlos > 0.0)) throw ConfigError("channel.gain_nlos_db", "must be finite");
  if (!(gain_los > gain_nlos)) {
    throw ConfigError("channel.gain_los_db", "LoS gain must exceed NLoS gain");
  }
  if (!(mean_dwell >= 0.0)) throw ConfigError("channel.mean_dwell_s", "must be >= 0");
  const double worst = max_latency();
  if (!(worst < tau)) {
    throw ConfigError("channel.payload_bits",
                      "worst-case latency " + std::to_string(worst) +
                          " s violates T_comm_max < tau = " + std::to_string(tau) +
                          " s (payload, bandwidth, noise, NLoS gain and slot length are "
                          "jointly infeasible)");
  }
}

double comm_latency(double gain, const ChannelParams& params) {
  if (!(gain > 0.0)) {
    throw DomainError("channel gain must be positive, got " + std::to_string(gain));
  }
  const double snr = params.tx_power * gain / params.noise_power;
  return params.payload_bits / (params.bandwidth * std::log2(1.0 + snr));
}

double comm_energy(double latency, const ChannelParams& params) {
  return params.tx_power * latency;
}

namespace {

LinkState draw_state(const ChannelParams& params, Rng& rng) {
  std::bernoulli_distribution los(params.los_probability());
  return los(rng) ? LinkState::kLos : LinkState::kNlos;
}

LinkState toggled(LinkState s) { return s == LinkState::kLos ? LinkState::kNlos : LinkState::kLos; }

}  // namespace

ChannelProcess start_channel(double now, const ChannelParams& params, Rng& rng) {
  ChannelProcess proc;
  proc.state = draw_state(params, rng);
  if (params.mean_dwell > 0.0) {
    std::exponential_distribution<double> dwell(1.0 / params.mean_dwell);
    proc.next_transition = now + dwell(rng);
  } else {
    proc.next_transition = now;
  }
  return proc;
}

ChannelProcess advance_channel(ChannelProcess proc, double until, const ChannelParams& params,
                               Rng& rng) {
  if (params.mean_dwell <= 0.0) {
    proc.state = draw_state(params, rng);
    proc.next_transition = until;
    return proc;
  }
  std::exponential_distribution<double> dwell(1.0 / params.mean_dwell);
  while (proc.next_transition <= until) {
    proc.state = toggled(proc.state);
    proc.next_transition += dwell(rng);
  }
  return proc;
}

}  // namespace coopsched
