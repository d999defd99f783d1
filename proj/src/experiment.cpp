#include "swarm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <thread>
#include <tuple>

#include "swarm/errors.hpp"
#include "swarm/rng.hpp"

namespace swarm {

using nlohmann::json;
using nlohmann::ordered_json;

std::size_t ExperimentMatrix::run_count() const {
  return site_configs.size() * static_cast<std::size_t>(std::max(sites_per_config, 0)) * algorithms.size() *
         robot_counts.size() * departures.size();
}

namespace {

template <typename T>
T get_checked(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("matrix: bad value for '") + key + "'");
  }
}

SiteConfig site_config_from_json(const json& j) {
  if (j.is_string()) {
    const auto named = site_config_by_name(j.get<std::string>());
    if (!named) throw ValidationError("matrix: unknown site config '" + j.get<std::string>() + "'");
    return *named;
  }
  if (!j.is_object()) throw ValidationError("matrix: a site config is a name or an object");
  SiteConfig c;
  // An object may start from a preset and override single fields.
  if (j.contains("base")) {
    const auto named = site_config_by_name(get_checked<std::string>(j, "base"));
    if (!named) throw ValidationError("matrix: unknown base config");
    c = *named;
  }
  static const std::array<const char*, 11> known{
      "name",          "base",          "width",         "height",      "rooms",
      "victims",       "island_probability", "nesting_probability", "corridor_min_width",
      "entrance_width", "max_actions_per_robot"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end()) {
      throw ValidationError("matrix: unknown site config key '" + key + "'");
    }
  }
  if (!j.contains("name")) throw ValidationError("matrix: custom site config needs a name");
  c.name = get_checked<std::string>(j, "name");
  if (j.contains("width")) c.params.width_cells = get_checked<int>(j, "width");
  if (j.contains("height")) c.params.height_cells = get_checked<int>(j, "height");
  if (j.contains("rooms")) c.params.n_rooms = get_checked<int>(j, "rooms");
  if (j.contains("victims")) c.params.n_victims = get_checked<int>(j, "victims");
  if (j.contains("island_probability")) c.params.island_probability = get_checked<double>(j, "island_probability");
  if (j.contains("nesting_probability")) c.params.nesting_probability = get_checked<double>(j, "nesting_probability");
  if (j.contains("corridor_min_width")) c.params.corridor_min_width = get_checked<int>(j, "corridor_min_width");
  if (j.contains("entrance_width")) c.params.entrance_width = get_checked<int>(j, "entrance_width");
  if (j.contains("max_actions_per_robot")) c.max_actions_per_robot = get_checked<int>(j, "max_actions_per_robot");
  if (c.max_actions_per_robot < 1) throw ValidationError("matrix: max_actions_per_robot must be positive");
  return c;
}

ordered_json site_config_to_json(const SiteConfig& c) {
  ordered_json j;
  j["name"] = c.name;
  j["width"] = c.params.width_cells;
  j["height"] = c.params.height_cells;
  j["rooms"] = c.params.n_rooms;
  j["victims"] = c.params.n_victims;
  j["island_probability"] = c.params.island_probability;
  j["nesting_probability"] = c.params.nesting_probability;
  j["corridor_min_width"] = c.params.corridor_min_width;
  j["entrance_width"] = c.params.entrance_width;
  j["max_actions_per_robot"] = c.max_actions_per_robot;
  return j;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const json& j, const char* key, Parse parse) {
  if (!j.is_array() || j.empty()) throw ValidationError(std::string("matrix: '") + key + "' must be a non-empty array");
  std::vector<T> out;
  for (const json& item : j) out.push_back(parse(item));
  return out;
}

RunKey key_from_json(const json& j) {
  RunKey k;
  k.config = j.at("config").get<std::string>();
  k.site_index = j.at("site_index").get<int>();
  const auto alg = parse_algorithm(j.at("algorithm").get<std::string>());
  if (!alg) throw ValidationError("unknown algorithm in archive");
  k.algorithm = *alg;
  k.n_robots = j.at("n_robots").get<int>();
  const auto dep = parse_departure(j.at("departure").get<std::string>());
  if (!dep) throw ValidationError("unknown departure in archive");
  k.departure = *dep;
  k.seed = j.at("seed").get<std::uint64_t>();
  return k;
}

ordered_json key_to_json(const RunKey& k) {
  ordered_json j;
  j["config"] = k.config;
  j["site_index"] = k.site_index;
  j["algorithm"] = std::string(canonical_name(k.algorithm));
  j["n_robots"] = k.n_robots;
  j["departure"] = std::string(to_string(k.departure));
  j["seed"] = k.seed;
  return j;
}

}  // namespace

ExperimentMatrix matrix_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("matrix must be a JSON object");
  static const std::array<const char*, 11> known{"configs",   "sites_per_config", "algorithms",      "robot_counts",
                                                 "departures", "base_seed",       "parallelism",     "sample_interval",
                                                 "revisit_threshold", "bias",     "comment"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end()) {
      throw ValidationError("matrix: unknown key '" + key + "'");
    }
  }
  ExperimentMatrix m;
  if (doc.contains("configs")) {
    m.site_configs = parse_list<SiteConfig>(doc.at("configs"), "configs", site_config_from_json);
  }
  if (doc.contains("sites_per_config")) m.sites_per_config = get_checked<int>(doc, "sites_per_config");
  if (doc.contains("algorithms")) {
    m.algorithms = parse_list<AlgorithmKind>(doc.at("algorithms"), "algorithms", [](const json& v) {
      const auto a = v.is_string() ? parse_algorithm(v.get<std::string>()) : std::nullopt;
      if (!a) throw ValidationError("matrix: unknown algorithm " + v.dump());
      return *a;
    });
  }
  if (doc.contains("robot_counts")) {
    m.robot_counts = parse_list<int>(doc.at("robot_counts"), "robot_counts", [](const json& v) {
      if (!v.is_number_integer() || v.get<int>() < 1) throw ValidationError("matrix: robot counts must be positive");
      return v.get<int>();
    });
  }
  if (doc.contains("departures")) {
    m.departures = parse_list<Departure>(doc.at("departures"), "departures", [](const json& v) {
      const auto d = v.is_string() ? parse_departure(v.get<std::string>()) : std::nullopt;
      if (!d) throw ValidationError("matrix: unknown departure " + v.dump());
      return *d;
    });
  }
  if (doc.contains("base_seed")) m.base_seed = get_checked<std::uint64_t>(doc, "base_seed");
  if (doc.contains("parallelism")) m.parallelism = get_checked<int>(doc, "parallelism");
  if (doc.contains("sample_interval")) m.sample_interval = get_checked<int>(doc, "sample_interval");
  if (doc.contains("revisit_threshold")) m.revisit_threshold = get_checked<int>(doc, "revisit_threshold");
  if (doc.contains("bias")) m.bias = get_checked<double>(doc, "bias");
  for (std::size_t i = 0; i < m.site_configs.size(); ++i) {
    for (std::size_t k = i + 1; k < m.site_configs.size(); ++k) {
      if (m.site_configs[i].name == m.site_configs[k].name) throw ValidationError("matrix: duplicate config name");
    }
  }
  if (m.sites_per_config < 1) throw ValidationError("matrix: sites_per_config must be positive");
  if (m.parallelism < 1) throw ValidationError("matrix: parallelism must be positive");
  if (m.sample_interval < 1) throw ValidationError("matrix: sample_interval must be positive");
  if (m.revisit_threshold < 1) throw ValidationError("matrix: revisit_threshold must be positive");
  return m;
}

ordered_json matrix_to_json(const ExperimentMatrix& m) {
  ordered_json j;
  ordered_json configs = ordered_json::array();
  for (const SiteConfig& c : m.site_configs) configs.push_back(site_config_to_json(c));
  j["configs"] = std::move(configs);
  j["sites_per_config"] = m.sites_per_config;
  ordered_json algs = ordered_json::array();
  for (AlgorithmKind a : m.algorithms) algs.push_back(std::string(canonical_name(a)));
  j["algorithms"] = std::move(algs);
  j["robot_counts"] = m.robot_counts;
  ordered_json deps = ordered_json::array();
  for (Departure d : m.departures) deps.push_back(std::string(to_string(d)));
  j["departures"] = std::move(deps);
  j["base_seed"] = m.base_seed;
  j["parallelism"] = m.parallelism;
  j["sample_interval"] = m.sample_interval;
  j["revisit_threshold"] = m.revisit_threshold;
  j["bias"] = m.bias;
  return j;
}

std::uint64_t site_seed(std::uint64_t base_seed, std::string_view config, int site_index) {
  std::uint64_t h = combine_seed(base_seed, fnv1a64("site"));
  h = combine_seed(h, fnv1a64(config));
  return combine_seed(h, static_cast<std::uint64_t>(site_index));
}

std::uint64_t run_seed(std::uint64_t base_seed, std::string_view config, int site_index, AlgorithmKind algorithm,
                       int n_robots, Departure departure) {
  std::uint64_t h = combine_seed(base_seed, fnv1a64(config));
  h = combine_seed(h, static_cast<std::uint64_t>(site_index));
  h = combine_seed(h, fnv1a64(canonical_name(algorithm)));
  h = combine_seed(h, static_cast<std::uint64_t>(n_robots));
  return combine_seed(h, fnv1a64(to_string(departure)));
}

std::vector<RunKey> enumerate_runs(const ExperimentMatrix& m) {
  std::vector<RunKey> keys;
  keys.reserve(m.run_count());
  for (const SiteConfig& c : m.site_configs) {
    for (int s = 0; s < m.sites_per_config; ++s) {
      for (AlgorithmKind a : m.algorithms) {
        for (int n : m.robot_counts) {
          for (Departure d : m.departures) {
            keys.push_back({c.name, s, a, n, d, run_seed(m.base_seed, c.name, s, a, n, d)});
          }
        }
      }
    }
  }
  return keys;
}

ordered_json archived_run_to_json(const ArchivedRun& run) {
  SimConfig config;
  config.max_actions_per_robot = run.max_actions_per_robot;
  config.sample_interval = run.sample_interval;
  config.revisit_threshold = run.revisit_threshold;
  config.bias = run.bias;
  return archive_entry(run.key, config, run.record);
}

ArchivedRun archived_run_from_json(const json& j) {
  try {
    ArchivedRun r;
    r.key = key_from_json(j);
    r.max_actions_per_robot = j.at("max_actions_per_robot").get<int>();
    r.sample_interval = j.at("sample_interval").get<int>();
    r.revisit_threshold = j.at("revisit_threshold").get<int>();
    r.bias = j.at("bias").get<double>();
    RunRecord& rec = r.record;
    rec.actions_per_robot = j.at("actions_per_robot").get<int>();
    rec.final_coverage = j.at("final_coverage").get<double>();
    rec.terminated_early = j.at("terminated_early").get<bool>();
    rec.crash_count = j.at("crash_count").get<int>();
    rec.rooms_total = j.at("rooms_total").get<int>();
    rec.rooms_entered = j.at("rooms_entered").get<int>();
    for (const json& v : j.at("victims_found")) {
      rec.victims_found.push_back({v.at("victim").get<int>(), v.at("action_count").get<int>()});
    }
    for (const json& s : j.at("samples")) rec.samples.push_back(sample_from_json(s));
    if (rec.samples.empty()) throw ValidationError("archived run has no samples");
    for (const json& p : j.at("initial_poses")) rec.initial_poses.push_back(pose_from_json(p));
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad archive entry: ") + e.what());
  }
}

BatchResult run_batch(const ExperimentMatrix& m) {
  const std::vector<RunKey> keys = enumerate_runs(m);
  const std::size_t n_sites = m.site_configs.size() * static_cast<std::size_t>(m.sites_per_config);
  std::vector<std::shared_ptr<const GridSite>> sites(n_sites);
  std::vector<std::string> site_errors(n_sites);

  auto parallel_for = [&](std::size_t count, auto&& body) {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    };
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(m.parallelism, 1)), count);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
  };

  parallel_for(n_sites, [&](std::size_t i) {
    const SiteConfig& c = m.site_configs[i / static_cast<std::size_t>(m.sites_per_config)];
    const int s = static_cast<int>(i % static_cast<std::size_t>(m.sites_per_config));
    SiteGenParams p = c.params;
    p.seed = site_seed(m.base_seed, c.name, s);
    try {
      sites[i] = std::make_shared<const GridSite>(generate(p));
    } catch (const std::exception& e) {
      site_errors[i] = e.what();
    }
  });

  const std::size_t runs_per_site = m.algorithms.size() * m.robot_counts.size() * m.departures.size();
  std::vector<std::optional<ArchivedRun>> done(keys.size());
  std::vector<std::string> errors(keys.size());
  parallel_for(keys.size(), [&](std::size_t i) {
    const std::size_t site_slot = i / runs_per_site;
    const RunKey& key = keys[i];
    if (!sites[site_slot]) {
      errors[i] = "site generation failed: " + site_errors[site_slot];
      return;
    }
    const SiteConfig& c = m.site_configs[site_slot / static_cast<std::size_t>(m.sites_per_config)];
    SimConfig config;
    config.site = sites[site_slot];
    config.algorithm = key.algorithm;
    config.n_robots = key.n_robots;
    config.departure = key.departure;
    config.max_actions_per_robot = c.max_actions_per_robot;
    config.sample_interval = m.sample_interval;
    config.seed = key.seed;
    config.revisit_threshold = m.revisit_threshold;
    config.bias = m.bias;
    try {
      ArchivedRun r{key, config.max_actions_per_robot, config.sample_interval, config.revisit_threshold, config.bias,
                    run(config)};
      done[i] = std::move(r);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  BatchResult result;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (done[i]) {
      result.runs.push_back(std::move(*done[i]));
    } else {
      result.failures.push_back({keys[i], errors[i]});
    }
  }
  return result;
}

std::string_view to_string(GroupKey k) {
  switch (k) {
    case GroupKey::Config: return "config";
    case GroupKey::Algorithm: return "algorithm";
    case GroupKey::NRobots: return "n_robots";
    case GroupKey::Departure: return "departure";
    case GroupKey::ActionCount: return "action_count";
  }
  return "?";
}

std::optional<GroupKey> parse_group_key(std::string_view name) {
  for (GroupKey k : kAllGroupKeys) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void GroupAccumulator::add(double coverage, double crashes) {
  coverage_.push_back(coverage);
  crashes_.push_back(crashes);
}

void GroupAccumulator::merge(const GroupAccumulator& other) {
  coverage_.insert(coverage_.end(), other.coverage_.begin(), other.coverage_.end());
  crashes_.insert(crashes_.end(), other.crashes_.begin(), other.crashes_.end());
}

namespace {

double sorted_mean(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double GroupAccumulator::mean_coverage() const { return sorted_mean(coverage_); }
double GroupAccumulator::mean_crash() const { return sorted_mean(crashes_); }

double GroupAccumulator::std_coverage() const {
  if (coverage_.empty()) return 0.0;
  std::vector<double> v = coverage_;
  std::sort(v.begin(), v.end());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

std::vector<int> sample_grid(int max_actions, int sample_interval) {
  if (max_actions < 1 || sample_interval < 1) throw DomainError("sample grid needs positive bounds");
  std::vector<int> grid;
  for (int t = sample_interval; t <= max_actions; t += sample_interval) grid.push_back(t);
  if (grid.empty() || grid.back() != max_actions) grid.push_back(max_actions);
  return grid;
}

const Sample& sample_at(const RunRecord& record, int action_count) {
  if (record.samples.empty()) throw DomainError("run has no samples");
  const Sample* best = &record.samples.front();
  for (const Sample& s : record.samples) {
    if (s.action_count <= action_count) best = &s;
  }
  return *best;
}

std::vector<AggregateRow> aggregate(const std::vector<ArchivedRun>& runs, const std::vector<GroupKey>& keys) {
  if (keys.empty()) throw DomainError("no group-by keys");
  auto has = [&](GroupKey k) { return std::find(keys.begin(), keys.end(), k) != keys.end(); };
  const bool by_config = has(GroupKey::Config);
  const bool by_alg = has(GroupKey::Algorithm);
  const bool by_n = has(GroupKey::NRobots);
  const bool by_dep = has(GroupKey::Departure);
  const bool by_time = has(GroupKey::ActionCount);

  // Numeric keys sort as numbers; -1 stands for an ungrouped one.
  using Key = std::tuple<std::string, std::string, int, std::string, int>;
  std::map<Key, GroupAccumulator> groups;
  for (const ArchivedRun& r : runs) {
    const std::string config = by_config ? r.key.config : "*";
    const std::string alg = by_alg ? std::string(canonical_name(r.key.algorithm)) : "*";
    const int n = by_n ? r.key.n_robots : -1;
    const std::string dep = by_dep ? std::string(to_string(r.key.departure)) : "*";
    if (by_time) {
      for (int t : sample_grid(r.max_actions_per_robot, r.sample_interval)) {
        const Sample& s = sample_at(r.record, t);
        groups[{config, alg, n, dep, t}].add(s.total_coverage, s.crash_count);
      }
    } else {
      const Sample& s = r.record.samples.back();
      groups[{config, alg, n, dep, -1}].add(s.total_coverage, s.crash_count);
    }
  }

  std::vector<AggregateRow> rows;
  for (const auto& [key, acc] : groups) {
    AggregateRow row;
    row.config = std::get<0>(key);
    row.algorithm = std::get<1>(key);
    row.n_robots = std::get<2>(key) < 0 ? "*" : std::to_string(std::get<2>(key));
    row.departure = std::get<3>(key);
    row.action_count = std::get<4>(key) < 0 ? "*" : std::to_string(std::get<4>(key));
    row.mean_coverage = acc.mean_coverage();
    row.std_coverage = acc.std_coverage();
    row.mean_crash = acc.mean_crash();
    row.runs = acc.count();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string rows_to_csv(const std::vector<AggregateRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  char buf[128];
  for (const AggregateRow& r : rows) {
    out += r.config + ',' + r.algorithm + ',' + r.n_robots + ',' + r.departure + ',' + r.action_count;
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%zu\n", r.mean_coverage, r.std_coverage, r.mean_crash, r.runs);
    out += buf;
  }
  return out;
}

std::string archive_to_jsonl(const std::vector<ArchivedRun>& runs) {
  std::string out;
  for (const ArchivedRun& r : runs) {
    out += archived_run_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<ArchivedRun> archive_from_jsonl(std::string_view text) {
  std::vector<ArchivedRun> runs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ValidationError("archive line " + std::to_string(line_no) + " is not valid JSON");
    runs.push_back(archived_run_from_json(j));
  }
  return runs;
}

std::string failures_to_jsonl(const std::vector<RunFailure>& failures) {
  std::string out;
  for (const RunFailure& f : failures) {
    ordered_json j = key_to_json(f.key);
    j["error"] = f.message;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace swarm
