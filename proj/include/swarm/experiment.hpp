#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "swarm/engine.hpp"
#include "swarm/record_io.hpp"
#include "swarm/sitegen.hpp"

namespace swarm {

/// Cross product of configs x sites x algorithms x swarm sizes x departures.
struct ExperimentMatrix {
  std::vector<SiteConfig> site_configs{big_config(), medium_config(), small_config()};
  int sites_per_config = 100;
  std::vector<AlgorithmKind> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::vector<int> robot_counts{2, 4, 6, 8, 10};
  std::vector<Departure> departures{Departure::Center, Departure::Edge};
  std::uint64_t base_seed = 0;
  int parallelism = 1;
  int sample_interval = 100;
  int revisit_threshold = 3;
  double bias = 0.0;

  std::size_t run_count() const;
};

/// Throws ValidationError on unknown keys, bad names or out-of-range values.
/// Missing keys keep their defaults.
ExperimentMatrix matrix_from_json(const nlohmann::json& doc);
nlohmann::ordered_json matrix_to_json(const ExperimentMatrix& m);

std::uint64_t site_seed(std::uint64_t base_seed, std::string_view config, int site_index);
std::uint64_t run_seed(std::uint64_t base_seed, std::string_view config, int site_index, AlgorithmKind algorithm,
                       int n_robots, Departure departure);

/// Runs in canonical order: config, site, algorithm, robot count, departure.
std::vector<RunKey> enumerate_runs(const ExperimentMatrix& m);

/// What the archive keeps of one run.
struct ArchivedRun {
  RunKey key;
  int max_actions_per_robot = 0;
  int sample_interval = 100;
  int revisit_threshold = 3;
  double bias = 0.0;
  RunRecord record;  // no trace

  friend bool operator==(const ArchivedRun&, const ArchivedRun&) = default;
};

ArchivedRun archived_run_from_json(const nlohmann::json& j);
nlohmann::ordered_json archived_run_to_json(const ArchivedRun& run);

struct RunFailure {
  RunKey key;
  std::string message;
};

struct BatchResult {
  std::vector<ArchivedRun> runs;  // canonical order, failures omitted
  std::vector<RunFailure> failures;
};

/// Executes the matrix on `parallelism` threads. Sites are generated once per
/// (config, site index) and shared by every run on them. The result does not
/// depend on the thread count.
BatchResult run_batch(const ExperimentMatrix& m);

enum class GroupKey { Config, Algorithm, NRobots, Departure, ActionCount };
inline constexpr std::array<GroupKey, 5> kAllGroupKeys{GroupKey::Config, GroupKey::Algorithm, GroupKey::NRobots,
                                                       GroupKey::Departure, GroupKey::ActionCount};
std::string_view to_string(GroupKey k);
std::optional<GroupKey> parse_group_key(std::string_view name);

/// Coverage and crash values of one group. Merging concatenates, and the
/// statistics are taken over the sorted values, so any split or merge order
/// gives bit-identical results.
class GroupAccumulator {
 public:
  void add(double coverage, double crashes);
  void merge(const GroupAccumulator& other);
  std::size_t count() const { return coverage_.size(); }
  double mean_coverage() const;
  double std_coverage() const;  // population
  double mean_crash() const;

 private:
  std::vector<double> coverage_;
  std::vector<double> crashes_;
};

/// Grouping keys as text; "*" marks a key that is not grouped on.
struct AggregateRow {
  std::string config;
  std::string algorithm;
  std::string n_robots;
  std::string departure;
  std::string action_count;
  double mean_coverage = 0.0;
  double std_coverage = 0.0;
  double mean_crash = 0.0;
  std::size_t runs = 0;
};

/// Sampling grid of a run: multiples of sample_interval up to the budget, plus
/// the budget itself when it is not a multiple.
std::vector<int> sample_grid(int max_actions, int sample_interval);

/// Value at action count t: the last sample at or before t. A run that ended
/// early keeps its final value for the rest of the grid.
const Sample& sample_at(const RunRecord& record, int action_count);

/// Rows sorted by key (numeric keys compare as numbers). Grouping on no key
/// at all is a usage error (DomainError).
std::vector<AggregateRow> aggregate(const std::vector<ArchivedRun>& runs, const std::vector<GroupKey>& keys);

inline constexpr std::string_view kCsvHeader =
    "config,algorithm,n_robots,departure,action_count,mean_coverage,std_coverage,mean_crash,runs";
std::string rows_to_csv(const std::vector<AggregateRow>& rows);

std::string archive_to_jsonl(const std::vector<ArchivedRun>& runs);
std::vector<ArchivedRun> archive_from_jsonl(std::string_view text);
std::string failures_to_jsonl(const std::vector<RunFailure>& failures);

}  // namespace swarm
