#include "coopsched/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "coopsched/errors.hpp"

namespace coopsched {

using nlohmann::json;

ChannelParams ChannelConfig::to_params() const {
  ChannelParams p;
  p.tx_power = tx_power_w;
  p.bandwidth = bandwidth_hz;
  p.payload_bits = payload_bits;
  p.noise_power = db_to_linear(noise_power_dbm - 30.0);
  p.gain_los = db_to_linear(gain_los_db);
  p.gain_nlos = db_to_linear(gain_nlos_db);
  p.mean_dwell = mean_dwell_s;
  return p;
}

WorldParams ScenarioConfig::world() const {
  WorldParams w;
  w.perception = perception;
  w.channel = channel.to_params();
  w.context = context;
  w.population = population;
  w.script = events;
  w.horizon = horizon;
  return w;
}

std::vector<PolicyKind> ScenarioConfig::policies() const {
  if (policy.name == "all") return {std::begin(kAllPolicies), std::end(kAllPolicies)};
  return {policy_from_string(policy.name)};
}

double ScenarioConfig::default_beta() const {
  const double slack = perception.tau - channel.to_params().max_latency();
  const double sqrt_beta = 1.0 / (slack * slack);
  return sqrt_beta * sqrt_beta;
}

PolicyParams ScenarioConfig::policy_params() const {
  return PolicyParams{
      .beta = policy.beta ? *policy.beta : default_beta(),
      .epsilon = policy.epsilon,
      .omega_low = policy.omega_low,
      .omega_high = policy.omega_high,
      .select_by_mean = policy.select_by_mean,
  };
}

void ScenarioConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon_slots", "must be >= 1");
  perception.validate();
  channel.to_params().validate(perception.tau);
  context.validate();
  population.validate();

  (void)policies();
  if (!(policy.epsilon >= 0.0 && policy.epsilon <= 1.0)) {
    throw ConfigError("policy.epsilon", "must lie in [0, 1]");
  }
  if (!(policy.omega_low < policy.omega_high)) {
    throw ConfigError("policy.omega_low", "must be < policy.omega_high");
  }
  if (policy.beta && !(*policy.beta > 0.0)) throw ConfigError("policy.beta", "must be > 0");
  if (run.traces < 1) throw ConfigError("run.traces", "must be >= 1");
  if (run.workers < 0) throw ConfigError("run.workers", "must be >= 0");

  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    const std::string field = "timeline.events[" + std::to_string(i) + "]";
    if (!(ev.time >= 0.0)) throw ConfigError(field + ".time_s", "must be >= 0");
    if (ev.kind == ScriptedKind::kDepart && !ev.vehicle) {
      throw ConfigError(field + ".vehicle", "required for depart");
    }
    if (ev.eta_avg && !(*ev.eta_avg >= 0.0)) throw ConfigError(field + ".eta_avg", "must be >= 0");
    if (ev.hold_until && !(*ev.hold_until >= ev.time)) {
      throw ConfigError(field + ".hold_until_s", "must be >= time_s");
    }
  }

  // Population can only shrink at event slots, so checking those suffices.
  Rng rng(0);
  const auto tl = resolve_timeline(world(), rng);
  (void)alive_set(tl, 0);
  for (const auto& ev : tl.events) (void)alive_set(tl, ev.slot);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

json preset_patch(const std::string& name) {
  if (name == "stationary") {
    return json{{"horizon_slots", 1200}, {"vehicles", {{"count", 10}}},
                {"timeline", {{"events", json::array()}}}};
  }
  if (name == "dynamic") {
    return json{
        {"horizon_slots", 400},
        {"vehicles", {{"count", 10}}},
        {"timeline",
         {{"events", json::array({
                         {{"type", "context"}, {"time_s", 8.0}, {"state", "complex"},
                          {"hold_until_s", 13.0}},
                         {{"type", "relabel"}, {"time_s", 10.0}},
                         {{"type", "context"}, {"time_s", 13.0}, {"state", "simple"}},
                     })}}},
    };
  }
  if (name == "none") return json::object();
  throw ConfigError("preset", "unknown preset \"" + name + "\" (stationary, dynamic, none)");
}

}  // namespace

std::vector<std::string> preset_names() { return {"stationary", "dynamic", "none"}; }

// ---------------------------------------------------------------------------
// JSON mapping
// ---------------------------------------------------------------------------

namespace {

ScriptedKind kind_from_string(const std::string& s, const std::string& field) {
  for (auto k : {ScriptedKind::kArrive, ScriptedKind::kDepart, ScriptedKind::kRelabel,
                 ScriptedKind::kContext}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError(field, "must be one of arrive, depart, relabel, context");
}

json event_to_json(const ScriptedEvent& ev) {
  json j{{"type", std::string(to_string(ev.kind))}, {"time_s", ev.time}};
  if (ev.vehicle) j["vehicle"] = *ev.vehicle;
  if (ev.eta_avg) j["eta_avg"] = *ev.eta_avg;
  if (ev.kind == ScriptedKind::kContext) {
    j["state"] = std::string(to_string(ev.context));
    if (ev.hold_until) j["hold_until_s"] = *ev.hold_until;
  }
  return j;
}

/// Strict object reader: tracks consumed keys and rejects the rest.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void get(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "must be a number");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "must be true or false");
      out = v->get<bool>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "must be a string");
      out = v->get<std::string>();
    }
  }
  template <class Int>
    requires std::is_integral_v<Int>
  void get(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "must be an integer");
      const double d = v->get<double>();
      if (v->is_number_float() && d != std::floor(d)) {
        throw ConfigError(field(key), "must be an integer");
      }
      if (std::is_unsigned_v<Int> && (v->is_number_integer() ? v->get<std::int64_t>() < 0 : d < 0)) {
        throw ConfigError(field(key), "must be >= 0");
      }
      out = v->is_number_unsigned() ? static_cast<Int>(v->get<std::uint64_t>())
            : v->is_number_integer() ? static_cast<Int>(v->get<std::int64_t>())
                                     : static_cast<Int>(d);
    }
  }
  template <class T>
  void get(const std::string& key, std::optional<T>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      T value{};
      const json wrapped{{key, *v}};
      Reader tmp(wrapped, path_);
      tmp.get(key, value);
      out = value;
    }
  }

  template <class F>
  void child(const std::string& key, F&& fn) {
    if (const json* v = find(key)) {
      Reader r(*v, field(key));
      fn(r);
      r.finish();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError(field(it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ScriptedEvent event_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  ScriptedEvent ev;
  std::string type;
  r.get("type", type);
  if (type.empty()) throw ConfigError(r.field("type"), "required");
  ev.kind = kind_from_string(type, r.field("type"));
  if (!r.find("time_s")) throw ConfigError(r.field("time_s"), "required");
  r.get("time_s", ev.time);
  r.get("vehicle", ev.vehicle);
  r.get("eta_avg", ev.eta_avg);
  std::string state;
  r.get("state", state);
  if (ev.kind == ScriptedKind::kContext) {
    if (state.empty()) throw ConfigError(r.field("state"), "required for context events");
    try {
      ev.context = context_state_from_string(state);
    } catch (const ConfigError&) {
      throw ConfigError(r.field("state"), "must be \"complex\" or \"simple\"");
    }
  }
  r.get("hold_until_s", ev.hold_until);
  r.finish();
  return ev;
}

}  // namespace

json to_json(const ScenarioConfig& c) {
  json events = json::array();
  for (const auto& ev : c.events) events.push_back(event_to_json(ev));
  return json{
      {"schema_version", kConfigSchemaVersion},
      {"preset", c.preset},
      {"horizon_slots", c.horizon},
      {"perception",
       {{"m", c.perception.m},
        {"n_per_gflop", c.perception.n},
        {"kappa", c.perception.kappa},
        {"r0", c.perception.r0},
        {"tau_s", c.perception.tau},
        {"load_inverse", std::string(to_string(c.perception.load_inverse))}}},
      {"channel",
       {{"tx_power_w", c.channel.tx_power_w},
        {"bandwidth_hz", c.channel.bandwidth_hz},
        {"payload_bits", c.channel.payload_bits},
        {"noise_power_dbm", c.channel.noise_power_dbm},
        {"gain_los_db", c.channel.gain_los_db},
        {"gain_nlos_db", c.channel.gain_nlos_db},
        {"mean_dwell_s", c.channel.mean_dwell_s}}},
      {"context",
       {{"omega_complex", c.context.omega_complex},
        {"omega_simple", c.context.omega_simple},
        {"dwell_complex_s", c.context.dwell_complex},
        {"dwell_simple_s", c.context.dwell_simple}}},
      {"vehicles",
       {{"count", c.population.initial_count},
        {"eta_avg_min", c.population.eta_avg_min},
        {"eta_avg_max", c.population.eta_avg_max},
        {"eta_sigma", c.population.eta_sigma}}},
      {"timeline",
       {{"arrival_rate", c.population.arrival_rate},
        {"departure_rate", c.population.departure_rate},
        {"events", events}}},
      {"policy",
       {{"name", c.policy.name},
        {"beta", c.policy.beta ? json(*c.policy.beta) : json(nullptr)},
        {"epsilon", c.policy.epsilon},
        {"omega_low", c.policy.omega_low},
        {"omega_high", c.policy.omega_high},
        {"select_by_mean", c.policy.select_by_mean}}},
      {"run",
       {{"traces", c.run.traces}, {"base_seed", c.run.base_seed}, {"workers", c.run.workers}}},
      {"output",
       {{"dir", c.output.dir},
        {"dump_traces", c.output.dump_traces},
        {"smooth_window", c.output.smooth_window}}},
  };
}

ScenarioConfig from_json(const json& j) {
  ScenarioConfig c;
  Reader root(j, "");
  int version = kConfigSchemaVersion;
  root.get("schema_version", version);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version " + std::to_string(version));
  }
  root.get("preset", c.preset);
  root.get("horizon_slots", c.horizon);
  root.child("perception", [&](Reader& r) {
    r.get("m", c.perception.m);
    r.get("n_per_gflop", c.perception.n);
    r.get("kappa", c.perception.kappa);
    r.get("r0", c.perception.r0);
    r.get("tau_s", c.perception.tau);
    std::string inverse(to_string(c.perception.load_inverse));
    r.get("load_inverse", inverse);
    c.perception.load_inverse = load_inverse_from_string(inverse);
  });
  root.child("channel", [&](Reader& r) {
    r.get("tx_power_w", c.channel.tx_power_w);
    r.get("bandwidth_hz", c.channel.bandwidth_hz);
    r.get("payload_bits", c.channel.payload_bits);
    r.get("noise_power_dbm", c.channel.noise_power_dbm);
    r.get("gain_los_db", c.channel.gain_los_db);
    r.get("gain_nlos_db", c.channel.gain_nlos_db);
    r.get("mean_dwell_s", c.channel.mean_dwell_s);
  });
  root.child("context", [&](Reader& r) {
    r.get("omega_complex", c.context.omega_complex);
    r.get("omega_simple", c.context.omega_simple);
    r.get("dwell_complex_s", c.context.dwell_complex);
    r.get("dwell_simple_s", c.context.dwell_simple);
  });
  root.child("vehicles", [&](Reader& r) {
    r.get("count", c.population.initial_count);
    r.get("eta_avg_min", c.population.eta_avg_min);
    r.get("eta_avg_max", c.population.eta_avg_max);
    r.get("eta_sigma", c.population.eta_sigma);
  });
  root.child("timeline", [&](Reader& r) {
    r.get("arrival_rate", c.population.arrival_rate);
    r.get("departure_rate", c.population.departure_rate);
    if (const json* events = r.find("events")) {
      if (!events->is_array()) throw ConfigError("timeline.events", "must be an array");
      for (std::size_t i = 0; i < events->size(); ++i) {
        c.events.push_back(
            event_from_json((*events)[i], "timeline.events[" + std::to_string(i) + "]"));
      }
    }
  });
  root.child("policy", [&](Reader& r) {
    r.get("name", c.policy.name);
    r.get("beta", c.policy.beta);
    r.get("epsilon", c.policy.epsilon);
    r.get("omega_low", c.policy.omega_low);
    r.get("omega_high", c.policy.omega_high);
    r.get("select_by_mean", c.policy.select_by_mean);
  });
  root.child("run", [&](Reader& r) {
    r.get("traces", c.run.traces);
    r.get("base_seed", c.run.base_seed);
    r.get("workers", c.run.workers);
  });
  root.child("output", [&](Reader& r) {
    r.get("dir", c.output.dir);
    r.get("dump_traces", c.output.dump_traces);
    r.get("smooth_window", c.output.smooth_window);
  });
  root.finish();
  return c;
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

namespace {

bool is_blank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

void apply_set(json& merged, const json& schema, const std::string& dotted,
               const std::string& raw) {
  std::string pointer = "/";
  for (char ch : dotted) pointer += ch == '.' ? '/' : ch;
  json::json_pointer ptr;
  try {
    ptr = json::json_pointer(pointer);
  } catch (const json::exception&) {
    throw ConfigError(dotted, "malformed field path");
  }
  if (!schema.contains(ptr) && !merged.contains(ptr)) throw ConfigError(dotted, "unknown field");
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  merged[ptr] = value;
}

}  // namespace

ScenarioConfig load_config_text(std::string_view text, const ConfigOverrides& overrides) {
  json file = json::object();
  if (!is_blank(text)) {
    try {
      file = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("<file>", std::string("parse error: ") + e.what());
    }
  }
  if (!file.is_object()) throw ConfigError("<root>", "must be an object");
  if (file.contains("config") && file.contains("config_hash")) {
    json embedded = file["config"];
    file = std::move(embedded);
  }

  const json schema = to_json(ScenarioConfig{});
  std::string preset = ScenarioConfig{}.preset;
  if (auto it = file.find("preset"); it != file.end() && it->is_string()) preset = *it;
  if (overrides.preset) preset = *overrides.preset;

  json merged = schema;
  merged.merge_patch(preset_patch(preset));
  merged.merge_patch(file);
  merged["preset"] = preset;
  for (const auto& [path, value] : overrides.sets) apply_set(merged, schema, path, value);

  ScenarioConfig config = from_json(merged);
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::optional<std::filesystem::path>& path,
                           const ConfigOverrides& overrides) {
  if (!path) return load_config_text("", overrides);
  std::ifstream in(*path);
  if (!in) throw IoError("cannot read config file " + path->string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str(), overrides);
}

namespace {

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json reproducible_part(const ScenarioConfig& config) {
  json j = to_json(config);
  j.erase("output");
  j["run"].erase("workers");
  return j;
}

}  // namespace

std::string config_hash(const ScenarioConfig& config) {
  return fnv1a_hex(reproducible_part(config).dump());
}

std::string scenario_hash(const ScenarioConfig& config) {
  json j = reproducible_part(config);
  j.erase("policy");
  return fnv1a_hex(j.dump());
}

}  // namespace coopsched
