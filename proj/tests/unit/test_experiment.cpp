#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "coopsched/errors.hpp"
#include "coopsched/experiment.hpp"

using namespace coopsched;
namespace fs = std::filesystem;

namespace {

ScenarioConfig small_config() {
  ConfigOverrides o;
  o.sets = {{"horizon_slots", "100"}, {"run.traces", "40"}, {"output.dump_traces", "2"}};
  return load_config_text("", o);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("coopsched_test_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("run_experiment writes every artifact") {
  TempDir dir("artifacts");
  const auto config = small_config();
  const auto result = run_experiment(config, dir.path);
  CHECK(result.summaries.size() == 5);

  const auto energy = slurp(dir.path / "energy_curve.csv");
  CHECK(energy.rfind("# schema: energy_curve/1\nslot,time_s,avucb,ucb,eps-greedy,random,oracle\n", 0) == 0);
  CHECK(count_lines(energy) == 2 + 100);
  const auto regret = slurp(dir.path / "regret_curve.csv");
  CHECK(regret.rfind("# schema: regret_curve/1\n", 0) == 0);
  CHECK(count_lines(regret) == 2 + 100);

  const auto traces = slurp(dir.path / "traces_avucb.csv");
  CHECK(count_lines(traces) == 2 + 2 * 100);
  CHECK(fs::exists(dir.path / "traces_oracle.csv"));

  const auto summary = nlohmann::json::parse(slurp(dir.path / "summary.json"));
  CHECK(summary["schema"] == "summary");
  CHECK(summary["policies"].size() == 5);
  CHECK(summary["scenario_hash"] == scenario_hash(config));

  const auto manifest = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
  CHECK(manifest["config_hash"] == config_hash(config));
  CHECK(load_config_text(manifest.dump()) == config);
}

TEST_CASE("rerunning from the manifest reproduces the outputs byte for byte") {
  TempDir a("rerun_a"), b("rerun_b");
  const auto config = small_config();
  run_experiment(config, a.path);
  const auto again = load_config_text(slurp(a.path / "manifest.json"));
  run_experiment(again, b.path);
  for (const char* f : {"energy_curve.csv", "regret_curve.csv", "summary.json", "manifest.json",
                        "traces_ucb.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a.path / f) == slurp(b.path / f));
  }
}

TEST_CASE("worker count does not change the outputs") {
  auto one = small_config();
  one.run.workers = 1;
  auto many = small_config();
  many.run.workers = 8;
  std::ostringstream a, b;
  write_energy_csv(a, simulate(one));
  write_energy_csv(b, simulate(many));
  CHECK(a.str() == b.str());
}

TEST_CASE("smoothing applies a trailing mean to the curves") {
  auto raw = small_config();
  raw.policy.name = "random";
  auto smooth = raw;
  smooth.output.smooth_window = 10;
  const auto result = simulate(raw);
  std::ostringstream a, b;
  write_energy_csv(a, result);
  write_energy_csv(b, ExperimentResult{smooth, result.summaries});
  CHECK(count_lines(a.str()) == count_lines(b.str()));
  CHECK(a.str() != b.str());
}

TEST_CASE("summary digests round trip through JSON") {
  const auto config = small_config();
  const auto result = simulate(config);
  const auto digests = digests_from_summary_json(summary_json(result));
  REQUIRE(digests.size() == 5);
  CHECK(digests[0].policy == "avucb");
  CHECK(digests[0].total_energy_mean == result.summaries[0].total_energy_mean);
  CHECK(digests[0].n_traces == 40);
  CHECK_THROWS_AS(digests_from_summary_json(nlohmann::json{{"schema", "summary"}}), ConfigError);
}

TEST_CASE("comparison against a baseline") {
  std::vector<SummaryDigest> d{{"avucb", "h", 10, 60.0, 1.0, 5, 0.1},
                               {"random", "h", 10, 150.0, 2.0, 0, 0.2},
                               {"oracle", "h", 10, 50.0, 1.0, 0, 0.05}};
  const auto rows = compare_policies(d);
  REQUIRE(rows.size() == 3);
  CHECK(*rows[0].savings == doctest::Approx(0.6));
  CHECK(*rows[1].savings == 0.0);

  const std::vector<SummaryDigest> self{{"oracle", "h", 10, 50.0, 1.0, 0, 0.05}};
  CHECK(*compare_policies(self, "oracle")[0].savings == 0.0);
  CHECK_FALSE(compare_policies(self)[0].savings.has_value());

  d[2].scenario_hash = "other";
  CHECK_THROWS_AS(compare_policies(d), ConfigError);

  std::ostringstream os;
  print_comparison(os, rows);
  CHECK(os.str().find("60.0%") != std::string::npos);
}

TEST_CASE("timeline JSON lists vehicles and events") {
  ConfigOverrides o;
  o.preset = "dynamic";
  const auto config = load_config_text("", o);
  const auto world = config.world();
  Rng rng(TraceSeed{1, 0}.stream(StreamTag::kGain));
  const auto j = timeline_json(resolve_timeline(world, rng), world);
  CHECK(j["vehicles"].size() == 11);
  REQUIRE(j["events"].size() == 3);
  CHECK(j["events"][1]["type"] == "relabel");
  CHECK(j["events"][1]["new"] == 10);
  CHECK(j["events"][0]["hold_until_slot"] == 260);
}

}
