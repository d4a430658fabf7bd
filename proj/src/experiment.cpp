#include "coopsched/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "coopsched/errors.hpp"

namespace coopsched {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

template <class Pick>
void write_curve_csv(std::ostream& os, const ExperimentResult& result, const char* name,
                     Pick&& pick) {
  const auto& cfg = result.config;
  std::vector<std::vector<double>> columns;
  for (const auto& s : result.summaries) {
    columns.push_back(trailing_mean(pick(s), cfg.output.smooth_window));
  }
  os << "# schema: " << name << "/" << kOutputSchemaVersion << '\n';
  os << "slot,time_s";
  for (const auto& s : result.summaries) os << ',' << to_string(s.policy);
  os << '\n';
  for (Slot slot = 0; slot < cfg.horizon; ++slot) {
    os << slot << ',' << fmt_double(static_cast<double>(slot) * cfg.perception.tau);
    for (const auto& c : columns) os << ',' << fmt_double(c[static_cast<std::size_t>(slot)]);
    os << '\n';
  }
}

}  // namespace

ExperimentResult simulate(const ScenarioConfig& config) {
  ExperimentResult result{config, {}};
  const auto world = config.world();
  const auto params = config.policy_params();
  for (PolicyKind kind : config.policies()) {
    result.summaries.push_back(
        run_batch(world, kind, params, config.run.traces, config.run.base_seed, config.run.workers));
  }
  return result;
}

void write_energy_csv(std::ostream& os, const ExperimentResult& result) {
  write_curve_csv(os, result, "energy_curve",
                  [](const BatchSummary& s) -> const std::vector<double>& { return s.mean_energy; });
}

void write_regret_csv(std::ostream& os, const ExperimentResult& result) {
  write_curve_csv(os, result, "regret_curve",
                  [](const BatchSummary& s) -> const std::vector<double>& { return s.mean_regret; });
}

void write_traces_csv(std::ostream& os, const ScenarioConfig& config, PolicyKind policy,
                      std::size_t n_traces) {
  const auto world = config.world();
  const auto params = config.policy_params();
  os << "# schema: traces/" << kOutputSchemaVersion << '\n';
  os << "trace,slot,time_s,omega,chosen,reason,exploratory,link,comm_latency_s,gain_ap,"
        "load_gflop,energy_j,cost_x,regret_increment\n";
  for (std::size_t t = 0; t < n_traces; ++t) {
    for (const auto& r : run_trace(world, policy, params, TraceSeed{config.run.base_seed, t})) {
      os << t << ',' << r.slot << ',' << fmt_double(r.time) << ',' << fmt_double(r.omega) << ','
         << to_index(r.chosen) << ',' << to_string(r.reason) << ',' << (r.exploratory ? 1 : 0)
         << ',' << to_string(r.link) << ',' << fmt_double(r.comm_latency) << ','
         << fmt_double(r.gain) << ',' << fmt_double(r.load) << ',' << fmt_double(r.energy) << ','
         << fmt_double(r.cost_x) << ',' << fmt_double(r.regret_increment) << '\n';
    }
  }
}

SummaryDigest digest(const BatchSummary& summary, const ScenarioConfig& config) {
  return SummaryDigest{
      .policy = std::string(to_string(summary.policy)),
      .scenario_hash = scenario_hash(config),
      .n_traces = summary.n_traces,
      .total_energy_mean = summary.total_energy_mean,
      .total_energy_std = summary.total_energy_std,
      .convergence_slot = summary.convergence_slot,
      .final_window_energy = summary.final_window_energy(),
  };
}

json summary_json(const ExperimentResult& result) {
  json policies = json::array();
  for (const auto& s : result.summaries) {
    const auto d = digest(s, result.config);
    policies.push_back({
        {"policy", d.policy},
        {"n_traces", d.n_traces},
        {"total_energy_mean_j", d.total_energy_mean},
        {"total_energy_std_j", d.total_energy_std},
        {"convergence_slot", d.convergence_slot},
        {"final_window_energy_j", d.final_window_energy},
        {"final_regret", s.mean_regret.empty() ? 0.0 : s.mean_regret.back()},
    });
  }
  return json{
      {"schema", "summary"},
      {"schema_version", kOutputSchemaVersion},
      {"scenario_hash", scenario_hash(result.config)},
      {"config_hash", config_hash(result.config)},
      {"horizon_slots", result.config.horizon},
      {"base_seed", result.config.run.base_seed},
      {"policies", policies},
  };
}

json manifest_json(const ScenarioConfig& config) {
  return json{
      {"schema", "manifest"},
      {"schema_version", kOutputSchemaVersion},
      {"config_hash", config_hash(config)},
      {"scenario_hash", scenario_hash(config)},
      {"base_seed", config.run.base_seed},
      {"config", to_json(config)},
  };
}

json timeline_json(const EpochTimeline& timeline, const WorldParams& world) {
  json vehicles = json::array();
  for (const auto& v : timeline.vehicles) {
    vehicles.push_back({
        {"id", to_index(v.id)},
        {"birth_slot", v.birth_slot},
        {"death_slot", v.death_slot == kNeverDies ? json(nullptr) : json(v.death_slot)},
        {"eta_avg", v.eta_avg},
        {"eta_sigma", v.eta_sigma},
    });
  }
  json events = json::array();
  for (const auto& ev : timeline.events) {
    json e{{"slot", ev.slot}, {"time_s", world.time_of(ev.slot)},
           {"type", std::string(to_string(ev.kind))}};
    switch (ev.kind) {
      case ScriptedKind::kArrive:
      case ScriptedKind::kDepart:
        e["vehicle"] = to_index(ev.vehicle);
        break;
      case ScriptedKind::kRelabel:
        e["old"] = to_index(ev.vehicle);
        e["new"] = to_index(ev.replacement);
        break;
      case ScriptedKind::kContext:
        e["state"] = std::string(to_string(ev.context));
        e["hold_until_slot"] = ev.hold_until >= 0 ? json(ev.hold_until) : json(nullptr);
        break;
    }
    events.push_back(std::move(e));
  }
  return json{{"horizon_slots", timeline.horizon},
              {"tau_s", world.perception.tau},
              {"vehicles", vehicles},
              {"events", events}};
}

ExperimentResult run_experiment(const ScenarioConfig& config,
                                const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  ExperimentResult result = simulate(config);
  {
    auto out = open_out(out_dir / "energy_curve.csv");
    write_energy_csv(out, result);
  }
  {
    auto out = open_out(out_dir / "regret_curve.csv");
    write_regret_csv(out, result);
  }
  if (config.output.dump_traces > 0) {
    for (const auto& s : result.summaries) {
      auto out = open_out(out_dir / ("traces_" + std::string(to_string(s.policy)) + ".csv"));
      write_traces_csv(out, config, s.policy, config.output.dump_traces);
    }
  }
  write_json(out_dir / "summary.json", summary_json(result));
  write_json(out_dir / "manifest.json", manifest_json(config));
  return result;
}

std::vector<SummaryDigest> digests_from_summary_json(const json& j) {
  std::vector<SummaryDigest> out;
  try {
    if (j.at("schema") != "summary") throw ConfigError("schema", "not a summary file");
    for (const auto& p : j.at("policies")) {
      out.push_back(SummaryDigest{
          .policy = p.at("policy").get<std::string>(),
          .scenario_hash = j.at("scenario_hash").get<std::string>(),
          .n_traces = p.at("n_traces").get<std::size_t>(),
          .total_energy_mean = p.at("total_energy_mean_j").get<double>(),
          .total_energy_std = p.at("total_energy_std_j").get<double>(),
          .convergence_slot = p.at("convergence_slot").get<Slot>(),
          .final_window_energy = p.at("final_window_energy_j").get<double>(),
      });
    }
  } catch (const json::exception& e) {
    throw ConfigError("summary", std::string("malformed summary: ") + e.what());
  }
  return out;
}

std::vector<ComparisonRow> compare_policies(std::span<const SummaryDigest> digests,
                                            const std::string& baseline) {
  if (digests.empty()) return {};
  for (const auto& d : digests) {
    if (d.scenario_hash != digests.front().scenario_hash) {
      throw ConfigError("scenario_hash", "summaries come from different scenarios (" +
                                             digests.front().scenario_hash + " vs " +
                                             d.scenario_hash + ")");
    }
  }
  std::optional<double> base;
  for (const auto& d : digests) {
    if (d.policy == baseline) {
      base = d.total_energy_mean;
      break;
    }
  }
  std::vector<ComparisonRow> rows;
  for (const auto& d : digests) {
    ComparisonRow row{d.policy, d.total_energy_mean, d.total_energy_std, std::nullopt,
                      d.convergence_slot, d.final_window_energy};
    if (base && *base > 0.0) row.savings = 1.0 - d.total_energy_mean / *base;
    rows.push_back(row);
  }
  return rows;
}

void print_comparison(std::ostream& os, std::span<const ComparisonRow> rows) {
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %16s %14s %10s %12s %16s\n", "policy", "total_energy_J",
                "std_J", "savings", "converge", "final_window_J");
  os << line;
  for (const auto& r : rows) {
    char savings[16] = "-";
    if (r.savings) std::snprintf(savings, sizeof savings, "%.1f%%", 100.0 * *r.savings);
    std::snprintf(line, sizeof line, "%-12s %16.1f %14.1f %10s %12lld %16.3f\n", r.policy.c_str(),
                  r.total_energy_mean, r.total_energy_std, savings,
                  static_cast<long long>(r.convergence_slot), r.final_window_energy);
    os << line;
  }
}

}  // namespace coopsched
