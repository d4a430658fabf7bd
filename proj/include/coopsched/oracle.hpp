#pragma once

#include "coopsched/channel_model.hpp"
#include "coopsched/perception_model.hpp"

namespace coopsched {

// Expected cost E[X] of a vehicle under the true gain and channel distributions.
//
//   E[X] = E[exp(-3 eta / m)] * E[1 / (tau - T_comm)^2]
//
// with eta = max(0, eta_avg + N(0, eta_sigma^2)) and the link state drawn from its stationary
// distribution. Gain and link are independent, so the expectation factorizes.

// E[exp(-a max(0, mu + sigma Z))], a = 3/m, in closed form.
double expected_gain_factor(double eta_avg, double eta_sigma, const PerceptionParams& perception);

// E[1 / (tau - T_comm)^2] over the stationary link distribution.
double expected_channel_factor(const ChannelParams& channel, const PerceptionParams& perception);

double expected_cost(double eta_avg, double eta_sigma, const ChannelParams& channel,
                     const PerceptionParams& perception);

}  // namespace coopsched
