#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "swarm/errors.hpp"
#include "swarm/experiment.hpp"

using namespace swarm;

namespace {

ExperimentMatrix tiny_matrix() {
  return matrix_from_json(nlohmann::json::parse(R"({
    "configs": [{"name": "tiny", "base": "small", "max_actions_per_robot": 200}],
    "sites_per_config": 3,
    "algorithms": ["random", "gas_sound"],
    "robot_counts": [2, 4],
    "departures": ["center", "edge"],
    "base_seed": 77
  })"));
}

ArchivedRun fake_run(std::string config, AlgorithmKind alg, int n, Departure dep, std::vector<double> coverage,
                     int budget = 300) {
  ArchivedRun r;
  r.key = {std::move(config), 0, alg, n, dep, 0};
  r.max_actions_per_robot = budget;
  r.sample_interval = 100;
  int t = 0;
  for (double c : coverage) {
    t += 100;
    r.record.samples.push_back({t, c, {}, static_cast<int>(t / 100)});
  }
  r.record.final_coverage = coverage.back();
  return r;
}

const AggregateRow& only_row(const std::vector<AggregateRow>& rows) {
  REQUIRE(rows.size() == 1);
  return rows.front();
}

}  // namespace

TEST_CASE("two runs 0.4 and 0.6: mean 0.5, std 0.1") {
  const std::vector<ArchivedRun> runs{fake_run("small", AlgorithmKind::UsingGas, 2, Departure::Center, {0.4}),
                                      fake_run("small", AlgorithmKind::UsingGas, 2, Departure::Center, {0.6})};
  const AggregateRow& row = only_row(aggregate(runs, {GroupKey::Config, GroupKey::Algorithm}));
  CHECK(row.mean_coverage == doctest::Approx(0.5));
  CHECK(row.std_coverage == doctest::Approx(0.1));
  CHECK(row.runs == 2);
  CHECK(row.n_robots == "*");
  CHECK(row.action_count == "*");
}

TEST_CASE("a single run has zero spread") {
  const std::vector<ArchivedRun> runs{fake_run("big", AlgorithmKind::Random, 4, Departure::Edge, {0.1, 0.3})};
  const AggregateRow& row = only_row(aggregate(runs, {GroupKey::Departure}));
  CHECK(row.std_coverage == 0.0);
  CHECK(row.mean_coverage == doctest::Approx(0.3));
  CHECK(row.mean_crash == doctest::Approx(2.0));
}

TEST_CASE("early-ended runs carry their last value across the grid") {
  CHECK(sample_grid(1000, 100) == std::vector<int>{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000});
  CHECK(sample_grid(250, 100) == std::vector<int>{100, 200, 250});
  CHECK(sample_grid(50, 100) == std::vector<int>{50});
  CHECK_THROWS_AS(sample_grid(0, 100), DomainError);

  ArchivedRun early = fake_run("small", AlgorithmKind::UsingGas, 2, Departure::Center, {0.5});
  early.record.samples.push_back({137, 1.0, {}, 3});
  early.record.terminated_early = true;
  CHECK(sample_at(early.record, 100).total_coverage == 0.5);
  CHECK(sample_at(early.record, 200).total_coverage == 1.0);
  CHECK(sample_at(early.record, 50).total_coverage == 0.5);

  const auto rows = aggregate({early}, {GroupKey::ActionCount});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].action_count == "100");
  CHECK(rows[2].action_count == "300");
  CHECK(rows[2].mean_coverage == 1.0);
}

TEST_CASE("rows sort numerically and ungrouped keys print as *") {
  std::vector<ArchivedRun> runs;
  for (int n : {10, 2, 4}) runs.push_back(fake_run("small", AlgorithmKind::UsingGas, n, Departure::Center, {0.2}));
  const auto rows = aggregate(runs, {GroupKey::NRobots});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].n_robots == "2");
  CHECK(rows[1].n_robots == "4");
  CHECK(rows[2].n_robots == "10");
  CHECK(rows[0].config == "*");
  CHECK_THROWS_AS(aggregate(runs, {}), DomainError);
  const std::string csv = rows_to_csv(rows);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(csv.find("*,*,2,*,*,0.200000,0.000000,1.000000,1\n") != std::string::npos);
}

TEST_CASE("grouping is associative: merged subsets equal the whole") {
  Rng rng(4);
  std::vector<ArchivedRun> runs;
  for (int k = 0; k < 200; ++k) {
    runs.push_back(fake_run(k % 2 ? "small" : "big", kAllAlgorithms[rng.below(5)], 2 + 2 * static_cast<int>(rng.below(5)),
                            rng.bernoulli(0.5) ? Departure::Center : Departure::Edge,
                            {rng.uniform() * 0.3, 0.3 + rng.uniform() * 0.3, 0.6 + rng.uniform() * 0.4}));
  }
  const std::vector<GroupKey> keys{GroupKey::Config, GroupKey::Algorithm};
  const auto whole = aggregate(runs, keys);

  // Two-pass oracle: split into chunks, accumulate each, merge in reverse order.
  std::map<std::pair<std::string, std::string>, std::vector<GroupAccumulator>> parts;
  for (std::size_t chunk = 0; chunk < 4; ++chunk) {
    for (std::size_t i = chunk; i < runs.size(); i += 4) {
      const auto key = std::make_pair(runs[i].key.config, std::string(canonical_name(runs[i].key.algorithm)));
      auto& v = parts[key];
      if (v.size() < 4) v.resize(4);
      v[chunk].add(runs[i].record.samples.back().total_coverage, runs[i].record.samples.back().crash_count);
    }
  }
  REQUIRE(whole.size() == parts.size());
  std::size_t idx = 0;
  for (auto& [key, accs] : parts) {
    GroupAccumulator merged;
    for (auto it = accs.rbegin(); it != accs.rend(); ++it) merged.merge(*it);
    const AggregateRow& row = whole[idx++];
    CHECK(row.config == key.first);
    CHECK(row.algorithm == key.second);
    CHECK(row.mean_coverage == merged.mean_coverage());
    CHECK(row.std_coverage == merged.std_coverage());
    CHECK(row.mean_crash == merged.mean_crash());
    CHECK(row.runs == merged.count());
  }

  // Shuffled input order gives the same CSV.
  auto shuffled = runs;
  std::reverse(shuffled.begin(), shuffled.end());
  std::rotate(shuffled.begin(), shuffled.begin() + 37, shuffled.end());
  CHECK(rows_to_csv(aggregate(shuffled, keys)) == rows_to_csv(whole));
}

TEST_CASE("matrix parsing") {
  const ExperimentMatrix m = tiny_matrix();
  CHECK(m.site_configs.size() == 1);
  CHECK(m.site_configs[0].name == "tiny");
  CHECK(m.site_configs[0].params.n_rooms == 30);
  CHECK(m.site_configs[0].max_actions_per_robot == 200);
  CHECK(m.run_count() == 3 * 2 * 2 * 2);
  CHECK(enumerate_runs(m).size() == m.run_count());
  CHECK(matrix_to_json(matrix_from_json(matrix_to_json(m))) == matrix_to_json(m));

  const ExperimentMatrix d = matrix_from_json(nlohmann::json::object());
  CHECK(d.run_count() == 3 * 100 * 5 * 5 * 2);
  const ExperimentMatrix s = matrix_from_json(nlohmann::json::parse(R"({"configs": ["small"], "sites_per_config": 30})"));
  CHECK(s.run_count() == 1500);

  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"bogus": 1})")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"algorithms": ["fast"]})")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"robot_counts": [0]})")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"configs": ["small", "small"]})")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"configs": [{"base": "small"}]})")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"parallelism": 0})")), ValidationError);
}

TEST_CASE("run seeds are distinct per run") {
  const ExperimentMatrix m = tiny_matrix();
  std::vector<std::uint64_t> seeds;
  for (const RunKey& k : enumerate_runs(m)) {
    CHECK(k.seed == run_seed(m.base_seed, k.config, k.site_index, k.algorithm, k.n_robots, k.departure));
    seeds.push_back(k.seed);
  }
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  CHECK(site_seed(1, "small", 0) != site_seed(1, "small", 1));
  CHECK(site_seed(1, "small", 0) != site_seed(1, "big", 0));
}

TEST_CASE("batches are identical at any parallelism") {
  ExperimentMatrix m = tiny_matrix();
  m.parallelism = 1;
  const BatchResult one = run_batch(m);
  m.parallelism = 8;
  const BatchResult eight = run_batch(m);
  CHECK(one.failures.empty());
  REQUIRE(one.runs.size() == m.run_count());
  CHECK(one.runs == eight.runs);
  CHECK(archive_to_jsonl(one.runs) == archive_to_jsonl(eight.runs));
  const std::vector<GroupKey> all(kAllGroupKeys.begin(), kAllGroupKeys.end());
  CHECK(rows_to_csv(aggregate(one.runs, all)) == rows_to_csv(aggregate(eight.runs, all)));

  // Every run appears once, in canonical order.
  const auto keys = enumerate_runs(m);
  for (std::size_t i = 0; i < keys.size(); ++i) CHECK(one.runs[i].key == keys[i]);

  // The archive round-trips exactly.
  CHECK(archive_from_jsonl(archive_to_jsonl(one.runs)) == one.runs);
}

TEST_CASE("failed sites are reported per run") {
  ExperimentMatrix m = matrix_from_json(nlohmann::json::parse(R"({
    "configs": [{"name": "cramped", "width": 12, "height": 12, "rooms": 200}],
    "sites_per_config": 1, "algorithms": ["gas"], "robot_counts": [2], "departures": ["center", "edge"]
  })"));
  const BatchResult r = run_batch(m);
  CHECK(r.runs.empty());
  REQUIRE(r.failures.size() == 2);
  CHECK(r.failures[0].key.departure == Departure::Center);
  CHECK_FALSE(r.failures[0].message.empty());
  CHECK(failures_to_jsonl(r.failures).find("cramped") != std::string::npos);
}

TEST_CASE("bad archives are rejected") {
  CHECK_THROWS_AS(archive_from_jsonl("{not json}\n"), ValidationError);
  CHECK_THROWS_AS(archive_from_jsonl("{\"key\": 3}\n"), ValidationError);
  CHECK(archive_from_jsonl("").empty());
  CHECK(parse_group_key("n_robots") == GroupKey::NRobots);
  CHECK_FALSE(parse_group_key("colour").has_value());
}
