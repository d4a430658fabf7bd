#pragma once

#include <string_view>

#include "coopsched/rng.hpp"

namespace coopsched {

enum class LinkState { kLos, kNlos };

std::string_view to_string(LinkState state) noexcept;

double db_to_linear(double db) noexcept;

/// Two-state V2V link. Gains are linear; the config file carries them in dB.
struct ChannelParams {
  double tx_power = 0.1;                 // W
  double bandwidth = 10e6;               // Hz
  double payload_bits = 2e6;             // bits per transmission
  double noise_power = 3.981071705534973e-14;  // W, -104 dBm
  double gain_los = 3.1622776601683794e-09;    // -85 dB
  double gain_nlos = 1e-10;                    // -100 dB
  double mean_dwell = 1.0;  // s; 0 resamples the state every slot

  // Latency under the given state.
  double latency(LinkState state) const;
  // Worst-case latency (NLoS).
  double max_latency() const { return latency(LinkState::kNlos); }
  // Long-run fraction of time in LoS.
  double los_probability() const { return 0.5; }

  /// Checks gain ordering and that the worst-case latency fits in a slot of length tau.
  void validate(double tau) const;

  bool operator==(const ChannelParams&) const = default;
};

/// Link state of one vehicle plus the absolute time of its next toggle.
struct ChannelProcess {
  LinkState state = LinkState::kLos;
  double next_transition = 0.0;  // s
};

// D / (B log2(1 + P h / sigma^2)). Throws DomainError for gain <= 0.
double comm_latency(double gain, const ChannelParams& params);

// P * latency.
double comm_energy(double latency, const ChannelParams& params);

// Draws a state from the stationary distribution and the first dwell starting at `now`.
ChannelProcess start_channel(double now, const ChannelParams& params, Rng& rng);

// Toggles the state once per expired exponential dwell up to `until`. In i.i.d. mode
// (mean_dwell == 0) the state is redrawn instead.
ChannelProcess advance_channel(ChannelProcess proc, double until, const ChannelParams& params,
                               Rng& rng);

}  // namespace coopsched
