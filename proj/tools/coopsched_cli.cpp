// coopsched: simulate, compare, validate and dump-timeline for sensor-sharing scheduling.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coopsched/config.hpp"
#include "coopsched/errors.hpp"
#include "coopsched/experiment.hpp"

namespace {

using namespace coopsched;

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::vector<std::string> sets;
  std::optional<std::string> policy;
  std::optional<double> beta;
  std::optional<double> epsilon;
  std::optional<long long> traces;
  std::optional<long long> horizon;
  std::optional<unsigned long long> seed;
  std::optional<int> workers;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "Scenario config (JSON) or manifest.json");
    app->add_option("--preset", preset, "Scenario preset: stationary, dynamic, none");
    app->add_option("--set", sets, "Override a config field: dotted.path=value")
        ->take_all();
    app->add_option("--policy", policy, "avucb|ucb|eps-greedy|random|oracle|all");
    app->add_option("--beta", beta, "Exploration constant (default from T_comm_max)");
    app->add_option("--epsilon", epsilon, "Exploration probability of eps-greedy");
    app->add_option("--traces", traces, "Monte Carlo traces per policy");
    app->add_option("--horizon", horizon, "Slots per trace");
    app->add_option("--seed", seed, "Base seed");
    app->add_option("--workers", workers, "Worker threads (0 = all)");
  }

  ConfigOverrides overrides() const {
    ConfigOverrides o;
    if (!preset.empty()) o.preset = preset;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(s, "expected dotted.path=value");
      o.sets.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    auto num = [](auto v) { return nlohmann::json(v).dump(); };
    if (policy) o.sets.emplace_back("policy.name", *policy);
    if (beta) o.sets.emplace_back("policy.beta", num(*beta));
    if (epsilon) o.sets.emplace_back("policy.epsilon", num(*epsilon));
    if (traces) o.sets.emplace_back("run.traces", num(*traces));
    if (horizon) o.sets.emplace_back("horizon_slots", num(*horizon));
    if (seed) o.sets.emplace_back("run.base_seed", num(*seed));
    if (workers) o.sets.emplace_back("run.workers", num(*workers));
    return o;
  }

  ScenarioConfig load(const std::vector<std::pair<std::string, std::string>>& extra = {}) const {
    auto o = overrides();
    o.sets.insert(o.sets.end(), extra.begin(), extra.end());
    std::optional<std::filesystem::path> path;
    if (!config_path.empty()) path = config_path;
    return load_config(path, o);
  }
};

int print_timeline(const ScenarioConfig& config, std::uint64_t trace) {
  const auto world = config.world();
  Environment env(world, TraceSeed{config.run.base_seed, trace});
  std::cout << timeline_json(env.timeline(), world).dump(2) << '\n';
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Online V2X sensor-sharing scheduler simulator"};
  app.require_subcommand(1);

  CommonOptions sim_opts;
  auto* sim = app.add_subcommand("simulate", "Run Monte Carlo traces and write results");
  sim_opts.attach(sim);
  std::string out_dir;
  std::optional<long long> dump_traces;
  std::optional<long long> smooth;
  bool dump_timeline = false;
  sim->add_option("-o,--out", out_dir, "Output directory (overrides output.dir)");
  sim->add_option("--dump-traces", dump_traces, "Write per-slot records of the first N traces");
  sim->add_option("--smooth", smooth, "Trailing smoothing window for emitted curves");
  sim->add_flag("--dump-timeline", dump_timeline, "Print trace 0's resolved timeline first");

  CommonOptions val_opts;
  auto* val = app.add_subcommand("validate", "Validate a config and print the resolved form");
  val_opts.attach(val);

  CommonOptions tl_opts;
  std::uint64_t tl_trace = 0;
  auto* tl = app.add_subcommand("dump-timeline", "Print the resolved event list of one trace");
  tl_opts.attach(tl);
  tl->add_option("--trace", tl_trace, "Trace index");

  std::vector<std::string> summaries;
  std::string baseline = "random";
  auto* cmp = app.add_subcommand("compare", "Compare policies from summary.json files");
  cmp->add_option("summaries", summaries, "summary.json files")->required();
  cmp->add_option("--baseline", baseline, "Policy used as the savings reference");

  CLI11_PARSE(app, argc, argv);

  if (*sim) {
    std::vector<std::pair<std::string, std::string>> extra;
    if (!out_dir.empty()) extra.emplace_back("output.dir", nlohmann::json(out_dir).dump());
    if (dump_traces) extra.emplace_back("output.dump_traces", std::to_string(*dump_traces));
    if (smooth) extra.emplace_back("output.smooth_window", std::to_string(*smooth));
    const auto config = sim_opts.load(extra);
    if (dump_timeline) print_timeline(config, 0);
    const auto result = run_experiment(config, config.output.dir);
    std::vector<SummaryDigest> digests;
    for (const auto& s : result.summaries) digests.push_back(digest(s, config));
    const auto rows = compare_policies(digests);
    print_comparison(std::cout, rows);
    std::cout << "results written to " << config.output.dir << '\n';
    return 0;
  }
  if (*val) {
    const auto config = val_opts.load();
    std::cout << to_json(config).dump(2) << '\n';
    std::cerr << "config OK (hash " << config_hash(config) << ", beta "
              << config.policy_params().beta << ", T_comm_max "
              << config.channel.to_params().max_latency() << " s)\n";
    return 0;
  }
  if (*tl) return print_timeline(tl_opts.load(), tl_trace);
  if (*cmp) {
    std::vector<SummaryDigest> digests;
    for (const auto& path : summaries) {
      std::ifstream in(path);
      if (!in) throw IoError("cannot read " + path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path, std::string("malformed JSON: ") + e.what());
      }
      const auto d = digests_from_summary_json(j);
      digests.insert(digests.end(), d.begin(), d.end());
    }
    const auto rows = compare_policies(digests, baseline);
    print_comparison(std::cout, rows);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kValidationFailure);
  } catch (const InfeasibleSlot& e) {
    std::cerr << "infeasible slot: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kRuntimeInfeasible);
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kIoFailure);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kIoFailure);
  }
}
