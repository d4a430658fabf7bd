#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "coopsched/channel_model.hpp"
#include "coopsched/perception_model.hpp"
#include "coopsched/rng.hpp"

namespace coopsched {

enum class VehicleId : std::uint32_t {};

constexpr std::uint32_t to_index(VehicleId id) noexcept { return static_cast<std::uint32_t>(id); }

using Slot = std::int64_t;
inline constexpr Slot kNeverDies = std::numeric_limits<Slot>::max();

/// One arm. eta_avg and eta_sigma are fixed for the vehicle's whole life; a lane change
/// ends the life and births a new id.
struct Vehicle {
  VehicleId id{};
  Slot birth_slot = 0;
  Slot death_slot = kNeverDies;
  double eta_avg = 0.0;    // AP points
  double eta_sigma = 0.0;  // AP points
  ChannelProcess channel;

  bool alive_at(Slot slot) const noexcept { return birth_slot <= slot && slot < death_slot; }
};

// ---------------------------------------------------------------------------
// Context complexity
// ---------------------------------------------------------------------------

enum class ContextState { kComplex, kSimple };

std::string_view to_string(ContextState state) noexcept;
ContextState context_state_from_string(std::string_view name);

struct ContextParams {
  double omega_complex = 2.0;   // AP points
  double omega_simple = -2.0;   // AP points
  double dwell_complex = 3.0;   // mean sojourn, s
  double dwell_simple = 6.0;    // mean sojourn, s

  double omega(ContextState s) const noexcept {
    return s == ContextState::kComplex ? omega_complex : omega_simple;
  }
  double mean_dwell(ContextState s) const noexcept {
    return s == ContextState::kComplex ? dwell_complex : dwell_simple;
  }
  double complex_fraction() const noexcept {
    return dwell_complex / (dwell_complex + dwell_simple);
  }
  void validate() const;

  bool operator==(const ContextParams&) const = default;
};

struct ContextProcess {
  ContextState state = ContextState::kSimple;
  double next_transition = 0.0;  // s

  double omega(const ContextParams& params) const noexcept { return params.omega(state); }
};

ContextProcess start_context(double now, const ContextParams& params, Rng& rng);

// Alternates complex/simple with state-specific exponential dwells up to `until`.
ContextProcess advance_context(ContextProcess ctx, double until, const ContextParams& params,
                               Rng& rng);

// ---------------------------------------------------------------------------
// Population and scenario script
// ---------------------------------------------------------------------------

struct PopulationParams {
  int initial_count = 10;
  double eta_avg_min = 0.0;
  double eta_avg_max = 5.0;
  double eta_sigma = 2.0;
  double arrival_rate = 0.0;    // unscripted arrivals per second
  double departure_rate = 0.0;  // unscripted departures per second

  void validate() const;

  bool operator==(const PopulationParams&) const = default;
};

enum class ScriptedKind { kArrive, kDepart, kRelabel, kContext };

std::string_view to_string(ScriptedKind kind) noexcept;

/// A scenario event as written in the config. Times are in seconds.
struct ScriptedEvent {
  ScriptedKind kind = ScriptedKind::kContext;
  double time = 0.0;
  // Depart/relabel target. A relabel without target picks the vehicle with the lowest true
  // expected cost among those alive.
  std::optional<std::uint32_t> vehicle;
  std::optional<double> eta_avg;  // arrive/relabel: fixed gain mean instead of a fresh draw
  ContextState context = ContextState::kComplex;
  std::optional<double> hold_until;  // context: suppress stochastic transitions until then

  bool operator==(const ScriptedEvent&) const = default;
};

/// Everything the environment needs to build one trace.
struct WorldParams {
  PerceptionParams perception;
  ChannelParams channel;
  ContextParams context;
  PopulationParams population;
  std::vector<ScriptedEvent> script;
  Slot horizon = 1200;

  Slot slot_of(double time) const;
  double time_of(Slot slot) const { return static_cast<double>(slot) * perception.tau; }

  bool operator==(const WorldParams&) const = default;
};

// ---------------------------------------------------------------------------
// Resolved timeline
// ---------------------------------------------------------------------------

struct TimelineEvent {
  ScriptedKind kind = ScriptedKind::kArrive;
  Slot slot = 0;
  VehicleId vehicle{};      // arriving, departing or relabeled (old) vehicle
  VehicleId replacement{};  // relabel only: the fresh id
  ContextState context = ContextState::kComplex;
  Slot hold_until = -1;  // context only; -1 = no hold
};

/// Concrete vehicles and events of one trace. vehicles[i].id == VehicleId{i}.
struct EpochTimeline {
  Slot horizon = 0;
  std::vector<Vehicle> vehicles;
  std::vector<TimelineEvent> events;  // sorted by slot, application order within a slot
};

// Resolves the scripted and Poisson events of `world` into concrete vehicles. Draws gain means
// from `rng`. Throws ConfigError if any slot would be left without a vehicle.
EpochTimeline resolve_timeline(const WorldParams& world, Rng& rng);

// Ids with birth_slot <= slot < death_slot, ascending. Throws ConfigError if empty.
std::vector<VehicleId> alive_set(const EpochTimeline& timeline, Slot slot);

double sample_eta_avg(const PopulationParams& params, Rng& rng);

// max(0, eta_avg + N(0, eta_sigma^2)).
double sample_gain(const Vehicle& v, Rng& rng);

/// What the scheduler learns after requesting a vehicle.
struct SlotObservation {
  VehicleId vehicle{};
  Slot slot = 0;
  LinkState link = LinkState::kLos;
  double comm_latency = 0.0;  // s
  double gain = 0.0;          // AP points
};

// Realized latency from the vehicle's current link state and a fresh gain draw.
SlotObservation observe(const Vehicle& v, Slot slot, const ChannelParams& channel, Rng& gain_rng);

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

/// The per-trace world. Slots must be entered in order with begin_slot. Only the requested
/// vehicle's gain is ever sampled.
class Environment {
 public:
  Environment(const WorldParams& world, TraceSeed seed);

  const WorldParams& world() const noexcept { return world_; }
  const EpochTimeline& timeline() const noexcept { return timeline_; }

  void begin_slot(Slot slot);

  Slot slot() const noexcept { return slot_; }
  double omega() const noexcept { return context_.omega(world_.context); }
  ContextState context_state() const noexcept { return context_.state; }
  std::span<const VehicleId> alive() const noexcept { return alive_; }
  const Vehicle& vehicle(VehicleId id) const { return timeline_.vehicles.at(to_index(id)); }

  // Truth hidden from learning policies.
  double expected_cost(VehicleId id) const { return expected_cost_.at(to_index(id)); }
  double best_expected_cost() const noexcept { return best_expected_cost_; }

  // One request per slot, alive vehicles only; throws SchedulingError otherwise.
  SlotObservation observe(VehicleId id);

 private:
  void apply_event(const TimelineEvent& ev, double now);

  WorldParams world_;
  Rng context_rng_;
  Rng channel_rng_;
  Rng gain_rng_;
  EpochTimeline timeline_;
  std::vector<double> expected_cost_;
  std::vector<VehicleId> alive_;
  std::size_t next_event_ = 0;
  ContextProcess context_;
  Slot slot_ = -1;
  bool observed_ = false;
  double best_expected_cost_ = 0.0;
};

}  // namespace coopsched
