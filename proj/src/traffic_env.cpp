#include "coopsched/traffic_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coopsched/errors.hpp"
#include "coopsched/oracle.hpp"

namespace coopsched {

std::string_view to_string(ContextState state) noexcept {
  return state == ContextState::kComplex ? "complex" : "simple";
}

ContextState context_state_from_string(std::string_view name) {
  if (name == "complex") return ContextState::kComplex;
  if (name == "simple") return ContextState::kSimple;
  throw ConfigError("context state", "must be \"complex\" or \"simple\"");
}

std::string_view to_string(ScriptedKind kind) noexcept {
  switch (kind) {
    case ScriptedKind::kArrive: return "arrive";
    case ScriptedKind::kDepart: return "depart";
    case ScriptedKind::kRelabel: return "relabel";
    case ScriptedKind::kContext: return "context";
  }
  return "?";
}

void ContextParams::validate() const {
  if (!(dwell_complex > 0.0)) throw ConfigError("context.dwell_complex_s", "must be > 0");
  if (!(dwell_simple > 0.0)) throw ConfigError("context.dwell_simple_s", "must be > 0");
  if (!std::isfinite(omega_complex)) throw ConfigError("context.omega_complex", "must be finite");
  if (!std::isfinite(omega_simple)) throw ConfigError("context.omega_simple", "must be finite");
}

void PopulationParams::validate() const {
  if (initial_count < 1) throw ConfigError("vehicles.count", "must be >= 1");
  if (!(eta_avg_min >= 0.0)) throw ConfigError("vehicles.eta_avg_min", "must be >= 0");
  if (!(eta_avg_max >= eta_avg_min)) {
    throw ConfigError("vehicles.eta_avg_max", "must be >= vehicles.eta_avg_min");
  }
  if (!(eta_sigma >= 0.0)) throw ConfigError("vehicles.eta_sigma", "must be >= 0");
  if (!(arrival_rate >= 0.0)) throw ConfigError("timeline.arrival_rate", "must be >= 0");
  if (!(departure_rate >= 0.0)) throw ConfigError("timeline.departure_rate", "must be >= 0");
}

Slot WorldParams::slot_of(double time) const {
  return static_cast<Slot>(std::llround(time / perception.tau));
}

ContextProcess start_context(double now, const ContextParams& params, Rng& rng) {
  std::bernoulli_distribution complex(params.complex_fraction());
  ContextProcess ctx;
  ctx.state = complex(rng) ? ContextState::kComplex : ContextState::kSimple;
  std::exponential_distribution<double> dwell(1.0 / params.mean_dwell(ctx.state));
  ctx.next_transition = now + dwell(rng);
  return ctx;
}

ContextProcess advance_context(ContextProcess ctx, double until, const ContextParams& params,
                               Rng& rng) {
  while (ctx.next_transition <= until) {
    ctx.state = ctx.state == ContextState::kComplex ? ContextState::kSimple
                                                    : ContextState::kComplex;
    std::exponential_distribution<double> dwell(1.0 / params.mean_dwell(ctx.state));
    ctx.next_transition += dwell(rng);
  }
  return ctx;
}

double sample_eta_avg(const PopulationParams& params, Rng& rng) {
  std::uniform_real_distribution<double> u(params.eta_avg_min, params.eta_avg_max);
  return u(rng);
}

double sample_gain(const Vehicle& v, Rng& rng) {
  if (v.eta_sigma <= 0.0) return std::max(0.0, v.eta_avg);
  std::normal_distribution<double> noise(0.0, v.eta_sigma);
  return std::max(0.0, v.eta_avg + noise(rng));
}

SlotObservation observe(const Vehicle& v, Slot slot, const ChannelParams& channel, Rng& gain_rng) {
  if (!v.alive_at(slot)) {
    throw SchedulingError("vehicle " + std::to_string(to_index(v.id)) + " is not alive at slot " +
                          std::to_string(slot));
  }
  return SlotObservation{
      .vehicle = v.id,
      .slot = slot,
      .link = v.channel.state,
      .comm_latency = channel.latency(v.channel.state),
      .gain = sample_gain(v, gain_rng),
  };
}

// ---------------------------------------------------------------------------
// Timeline resolution
// ---------------------------------------------------------------------------

namespace {

struct PendingEvent {
  Slot slot = 0;
  bool scripted = true;
  std::size_t script_index = 0;  // scripted only
  ScriptedKind kind = ScriptedKind::kArrive;
};

std::vector<Slot> poisson_slots(double rate, const WorldParams& world, Rng& rng) {
  std::vector<Slot> out;
  if (rate <= 0.0) return out;
  std::exponential_distribution<double> gap(rate);
  const double end = world.time_of(world.horizon);
  for (double t = gap(rng); t < end; t += gap(rng)) {
    const Slot s = static_cast<Slot>(std::floor(t / world.perception.tau));
    if (s > 0 && s < world.horizon) out.push_back(s);
  }
  return out;
}

std::string event_field(std::size_t i, const char* leaf) {
  return "timeline.events[" + std::to_string(i) + "]." + leaf;
}

}  // namespace

EpochTimeline resolve_timeline(const WorldParams& world, Rng& rng) {
  EpochTimeline tl;
  tl.horizon = world.horizon;
  const auto& pop = world.population;

  auto add_vehicle = [&](Slot birth, std::optional<double> eta_avg) {
    Vehicle v;
    v.id = VehicleId{static_cast<std::uint32_t>(tl.vehicles.size())};
    v.birth_slot = birth;
    v.eta_avg = eta_avg ? *eta_avg : sample_eta_avg(pop, rng);
    v.eta_sigma = pop.eta_sigma;
    tl.vehicles.push_back(v);
    return v.id;
  };

  std::vector<VehicleId> alive;
  for (int i = 0; i < pop.initial_count; ++i) alive.push_back(add_vehicle(0, std::nullopt));

  std::vector<PendingEvent> pending;
  for (std::size_t i = 0; i < world.script.size(); ++i) {
    const auto& ev = world.script[i];
    const Slot s = world.slot_of(ev.time);
    if (s < 0) throw ConfigError(event_field(i, "time_s"), "must be >= 0");
    if (s >= world.horizon) continue;
    pending.push_back({s, true, i, ev.kind});
  }
  for (Slot s : poisson_slots(pop.arrival_rate, world, rng)) {
    pending.push_back({s, false, 0, ScriptedKind::kArrive});
  }
  for (Slot s : poisson_slots(pop.departure_rate, world, rng)) {
    pending.push_back({s, false, 0, ScriptedKind::kDepart});
  }
  std::stable_sort(pending.begin(), pending.end(),
                   [](const PendingEvent& a, const PendingEvent& b) { return a.slot < b.slot; });

  const double channel_factor = expected_channel_factor(world.channel, world.perception);
  auto kill = [&](VehicleId id, Slot slot) {
    tl.vehicles[to_index(id)].death_slot = slot;
    alive.erase(std::find(alive.begin(), alive.end(), id));
  };
  auto find_alive = [&](std::uint32_t raw, std::size_t i, Slot slot) {
    const VehicleId id{raw};
    if (std::find(alive.begin(), alive.end(), id) == alive.end()) {
      throw ConfigError(event_field(i, "vehicle"),
                        "vehicle " + std::to_string(raw) + " is not alive at slot " +
                            std::to_string(slot));
    }
    return id;
  };

  for (const auto& p : pending) {
    TimelineEvent out;
    out.kind = p.kind;
    out.slot = p.slot;
    const ScriptedEvent* script = p.scripted ? &world.script[p.script_index] : nullptr;

    switch (p.kind) {
      case ScriptedKind::kArrive:
        out.vehicle = add_vehicle(p.slot, script ? script->eta_avg : std::nullopt);
        alive.push_back(out.vehicle);
        break;

      case ScriptedKind::kDepart: {
        if (script) {
          if (!script->vehicle) {
            throw ConfigError(event_field(p.script_index, "vehicle"), "required for depart");
          }
          out.vehicle = find_alive(*script->vehicle, p.script_index, p.slot);
          if (alive.size() == 1) {
            throw ConfigError(event_field(p.script_index, "vehicle"),
                              "departure would leave no vehicle alive at slot " +
                                  std::to_string(p.slot));
          }
        } else {
          if (alive.size() <= 1) continue;
          std::uniform_int_distribution<std::size_t> pick(0, alive.size() - 1);
          out.vehicle = alive[pick(rng)];
        }
        kill(out.vehicle, p.slot);
        break;
      }

      case ScriptedKind::kRelabel: {
        if (script->vehicle) {
          out.vehicle = find_alive(*script->vehicle, p.script_index, p.slot);
        } else {
          double best = std::numeric_limits<double>::infinity();
          for (VehicleId id : alive) {
            const auto& v = tl.vehicles[to_index(id)];
            const double c = expected_gain_factor(v.eta_avg, v.eta_sigma, world.perception) *
                             channel_factor;
            if (c < best) {
              best = c;
              out.vehicle = id;
            }
          }
        }
        kill(out.vehicle, p.slot);
        out.replacement = add_vehicle(p.slot, script->eta_avg);
        alive.push_back(out.replacement);
        break;
      }

      case ScriptedKind::kContext:
        out.context = script->context;
        out.hold_until = script->hold_until ? world.slot_of(*script->hold_until) : -1;
        break;
    }
    std::sort(alive.begin(), alive.end());
    tl.events.push_back(out);
  }
  return tl;
}

std::vector<VehicleId> alive_set(const EpochTimeline& timeline, Slot slot) {
  if (slot < 0 || slot >= timeline.horizon) {
    throw DomainError("slot " + std::to_string(slot) + " outside horizon [0, " +
                      std::to_string(timeline.horizon) + ")");
  }
  std::vector<VehicleId> out;
  for (const auto& v : timeline.vehicles) {
    if (v.alive_at(slot)) out.push_back(v.id);
  }
  if (out.empty()) {
    throw ConfigError("timeline", "no vehicle alive at slot " + std::to_string(slot));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

Environment::Environment(const WorldParams& world, TraceSeed seed)
    : world_(world),
      context_rng_(seed.stream(StreamTag::kContext)),
      channel_rng_(seed.stream(StreamTag::kChannel)),
      gain_rng_(seed.stream(StreamTag::kGain)) {
  timeline_ = resolve_timeline(world_, gain_rng_);
  const double channel_factor = expected_channel_factor(world_.channel, world_.perception);
  expected_cost_.reserve(timeline_.vehicles.size());
  for (auto& v : timeline_.vehicles) {
    v.channel = start_channel(world_.time_of(v.birth_slot), world_.channel, channel_rng_);
    expected_cost_.push_back(expected_gain_factor(v.eta_avg, v.eta_sigma, world_.perception) *
                             channel_factor);
  }
  context_ = start_context(0.0, world_.context, context_rng_);
}

void Environment::apply_event(const TimelineEvent& ev, double now) {
  auto drop = [this](VehicleId id) { std::erase(alive_, id); };
  switch (ev.kind) {
    case ScriptedKind::kArrive:
      alive_.push_back(ev.vehicle);
      break;
    case ScriptedKind::kDepart:
      drop(ev.vehicle);
      break;
    case ScriptedKind::kRelabel:
      drop(ev.vehicle);
      alive_.push_back(ev.replacement);
      break;
    case ScriptedKind::kContext: {
      context_.state = ev.context;
      const double from = ev.hold_until >= 0 ? world_.time_of(ev.hold_until) : now;
      std::exponential_distribution<double> dwell(1.0 / world_.context.mean_dwell(ev.context));
      context_.next_transition = from + dwell(context_rng_);
      break;
    }
  }
}

void Environment::begin_slot(Slot slot) {
  if (slot != slot_ + 1) {
    throw SchedulingError("slots must be entered in order: expected " + std::to_string(slot_ + 1) +
                          ", got " + std::to_string(slot));
  }
  slot_ = slot;
  observed_ = false;
  const double now = world_.time_of(slot);

  if (slot == 0) {
    for (const auto& v : timeline_.vehicles) {
      if (v.alive_at(0)) alive_.push_back(v.id);
    }
  }
  context_ = advance_context(context_, now, world_.context, context_rng_);

  bool changed = false;
  while (next_event_ < timeline_.events.size() && timeline_.events[next_event_].slot <= slot) {
    apply_event(timeline_.events[next_event_++], now);
    changed = true;
  }
  if (changed) std::sort(alive_.begin(), alive_.end());
  if (alive_.empty()) {
    throw ConfigError("timeline", "no vehicle alive at slot " + std::to_string(slot));
  }

  best_expected_cost_ = std::numeric_limits<double>::infinity();
  for (VehicleId id : alive_) {
    auto& v = timeline_.vehicles[to_index(id)];
    v.channel = advance_channel(v.channel, now, world_.channel, channel_rng_);
    best_expected_cost_ = std::min(best_expected_cost_, expected_cost_[to_index(id)]);
  }
}

SlotObservation Environment::observe(VehicleId id) {
  if (observed_) {
    throw SchedulingError("only one vehicle can be requested per slot (slot " +
                          std::to_string(slot_) + ")");
  }
  if (std::find(alive_.begin(), alive_.end(), id) == alive_.end()) {
    throw SchedulingError("vehicle " + std::to_string(to_index(id)) + " is not alive at slot " +
                          std::to_string(slot_));
  }
  observed_ = true;
  return coopsched::observe(vehicle(id), slot_, world_.channel, gain_rng_);
}

}  // namespace coopsched
