// swarmsearch: site generation, single runs, batch experiments, statistics
// and SVG rendering.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarm/engine.hpp"
#include "swarm/errors.hpp"
#include "swarm/experiment.hpp"
#include "swarm/record_io.hpp"
#include "swarm/render.hpp"
#include "swarm/rng.hpp"
#include "swarm/site_io.hpp"
#include "swarm/sitegen.hpp"

namespace fs = std::filesystem;
using namespace swarm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitPartial = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --out wins, then SWARMSEARCH_OUT_DIR, then the default.
fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SWARMSEARCH_OUT_DIR"); env && *env) return env;
  return "swarmsearch_out";
}

fs::path prepare_dir(const std::string& flag) {
  fs::path dir = output_dir(flag);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::string algorithm_names() {
  std::string names;
  for (AlgorithmKind k : kAllAlgorithms) {
    if (!names.empty()) names += ", ";
    names += canonical_name(k);
  }
  return names;
}

AlgorithmKind algorithm_arg(const std::string& name) {
  const auto k = parse_algorithm(name);
  if (!k) throw UsageError("unknown algorithm '" + name + "' (expected one of: " + algorithm_names() + ")");
  return *k;
}

Departure departure_arg(const std::string& name) {
  const auto d = parse_departure(name);
  if (!d) throw UsageError("unknown departure '" + name + "' (expected center or edge)");
  return *d;
}

SiteConfig config_arg(const std::string& name) {
  const auto c = site_config_by_name(name);
  if (!c) throw UsageError("unknown site config '" + name + "' (expected big, medium or small)");
  return *c;
}

// Generator overrides shared by gen and run. Negative means "keep the preset".
struct SiteFlags {
  std::string config = "small";
  int width = -1;
  int height = -1;
  int rooms = -1;
  int victims = -1;
  double island_probability = -1.0;
  double nesting_probability = -1.0;
  int corridor_width = -1;
  int entrance_width = -1;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "Site preset: big, medium or small")->capture_default_str();
    app->add_option("--width", width, "Site width in cells");
    app->add_option("--height", height, "Site height in cells");
    app->add_option("--rooms", rooms, "Number of rooms");
    app->add_option("--victims", victims, "Number of victims");
    app->add_option("--island-prob", island_probability, "Probability of a detached island per site");
    app->add_option("--nesting-prob", nesting_probability, "Probability of nesting per split");
    app->add_option("--corridor-width", corridor_width, "Minimum corridor width in cells");
    app->add_option("--entrance-width", entrance_width, "Entrance width in cells (1-3)");
  }

  SiteConfig resolve() const {
    SiteConfig c = config_arg(config);
    if (width >= 0) c.params.width_cells = width;
    if (height >= 0) c.params.height_cells = height;
    if (rooms >= 0) c.params.n_rooms = rooms;
    if (victims >= 0) c.params.n_victims = victims;
    if (island_probability >= 0.0) c.params.island_probability = island_probability;
    if (nesting_probability >= 0.0) c.params.nesting_probability = nesting_probability;
    if (corridor_width >= 0) c.params.corridor_min_width = corridor_width;
    if (entrance_width >= 0) c.params.entrance_width = entrance_width;
    return c;
  }
};

int cmd_gen(const SiteFlags& flags, int count, std::uint64_t seed, const std::string& out) {
  if (count < 1) throw UsageError("--count must be at least 1");
  const SiteConfig config = flags.resolve();
  const fs::path dir = prepare_dir(out);
  int written = 0;
  int failed = 0;
  for (int i = 0; i < count; ++i) {
    SiteGenParams p = config.params;
    p.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    char name[64];
    std::snprintf(name, sizeof name, "site_%04d.json", i);
    try {
      const GridSite site = generate(p);
      const auto violations = validate_site(site);
      if (!violations.empty()) {
        std::fprintf(stderr, "seed %llu: %zu violations, first: %s\n", static_cast<unsigned long long>(p.seed),
                     violations.size(), to_string(violations.front().kind).c_str());
        ++failed;
        continue;
      }
      save_site(site, (dir / name).string());
      ++written;
    } catch (const InfeasibleParams& e) {
      std::fprintf(stderr, "seed %llu: %s\n", static_cast<unsigned long long>(p.seed), e.what());
      ++failed;
    }
  }
  std::printf("generated %d site(s) in %s, %d valid, %d failed\n", count, dir.string().c_str(), written, failed);
  return failed == 0 ? kExitOk : kExitValidation;
}

struct RunFlags {
  std::string site_file;
  std::uint64_t site_seed = 0;
  std::string algorithm = "gas_sound";
  int robots = 2;
  std::string departure = "center";
  std::uint64_t seed = 0;
  int max_actions = -1;
  int sample_interval = 100;
  int threshold = 3;
  double bias = 0.0;
  bool trace = false;
  std::string name = "run";
  std::string out;
};

int cmd_run(const SiteFlags& site_flags, const RunFlags& f) {
  const SiteConfig preset = site_flags.resolve();
  SimConfig config;
  RunKey key;
  if (!f.site_file.empty()) {
    config.site = std::make_shared<const GridSite>(load_site(f.site_file));
    key.config = "file";
  } else {
    SiteGenParams p = preset.params;
    p.seed = f.site_seed;
    config.site = std::make_shared<const GridSite>(generate(p));
    key.config = preset.name;
  }
  config.algorithm = algorithm_arg(f.algorithm);
  config.n_robots = f.robots;
  config.departure = departure_arg(f.departure);
  config.max_actions_per_robot = f.max_actions > 0 ? f.max_actions : preset.max_actions_per_robot;
  config.sample_interval = f.sample_interval;
  config.seed = f.seed;
  config.revisit_threshold = f.threshold;
  config.bias = f.bias;
  config.record_trace = f.trace;
  key.algorithm = config.algorithm;
  key.n_robots = config.n_robots;
  key.departure = config.departure;
  key.seed = config.seed;

  const RunRecord record = run(config);
  const fs::path dir = prepare_dir(f.out);
  write_text_file((dir / (f.name + "_summary.json")).string(), summary_to_json(key, config, record).dump(2) + "\n");
  write_text_file((dir / (f.name + "_samples.jsonl")).string(), samples_to_jsonl(record));
  if (record.trace) write_text_file((dir / (f.name + "_trace.jsonl")).string(), trace_to_jsonl(*record.trace));
  std::printf("%s %d robots %s: coverage %.4f (%d/%d rooms) after %d actions%s, %d crashes\n",
              std::string(canonical_name(config.algorithm)).c_str(), config.n_robots,
              std::string(to_string(config.departure)).c_str(), record.final_coverage, record.rooms_entered,
              record.rooms_total, record.actions_per_robot, record.terminated_early ? " (early)" : "",
              record.crash_count);
  return kExitOk;
}

struct BatchFlags {
  std::string matrix_file;
  std::vector<std::string> configs;
  int sites = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int parallelism = -1;
  std::string out;
};

int cmd_batch(const BatchFlags& f) {
  ExperimentMatrix m;
  if (!f.matrix_file.empty()) {
    const auto doc = nlohmann::json::parse(read_text_file(f.matrix_file), nullptr, false);
    if (doc.is_discarded()) throw ValidationError(f.matrix_file + " is not valid JSON");
    m = matrix_from_json(doc);
  }
  if (!f.configs.empty()) {
    m.site_configs.clear();
    for (const std::string& c : f.configs) m.site_configs.push_back(config_arg(c));
  }
  if (f.sites > 0) m.sites_per_config = f.sites;
  if (f.seed_set) m.base_seed = f.seed;
  if (f.parallelism > 0) m.parallelism = f.parallelism;

  const fs::path dir = prepare_dir(f.out);
  std::fprintf(stderr, "running %zu runs on %d thread(s)\n", m.run_count(), m.parallelism);
  const BatchResult result = run_batch(m);
  write_text_file((dir / "matrix.json").string(), matrix_to_json(m).dump(2) + "\n");
  write_text_file((dir / "runs.jsonl").string(), archive_to_jsonl(result.runs));
  write_text_file((dir / "errors.jsonl").string(), failures_to_jsonl(result.failures));
  const std::vector<GroupKey> all(kAllGroupKeys.begin(), kAllGroupKeys.end());
  write_text_file((dir / "results.csv").string(), rows_to_csv(aggregate(result.runs, all)));
  std::printf("%zu runs done, %zu failed; results in %s\n", result.runs.size(), result.failures.size(),
              dir.string().c_str());
  return result.failures.empty() ? kExitOk : kExitPartial;
}

int cmd_stats(const std::string& archive, const std::vector<std::string>& group_by, bool group_by_given,
              const std::string& out_file) {
  std::vector<GroupKey> keys;
  if (!group_by_given) {
    keys.assign(kAllGroupKeys.begin(), kAllGroupKeys.end());
  } else {
    for (const std::string& name : group_by) {
      if (name.empty()) continue;
      const auto k = parse_group_key(name);
      if (!k) {
        throw UsageError("unknown group-by key '" + name +
                         "' (expected config, algorithm, n_robots, departure, action_count)");
      }
      keys.push_back(*k);
    }
    if (keys.empty()) throw UsageError("empty group-by set");
  }
  const std::vector<ArchivedRun> runs = archive_from_jsonl(read_text_file(archive));
  if (runs.empty()) throw UsageError("archive " + archive + " holds no runs");
  const std::string csv = rows_to_csv(aggregate(runs, keys));
  if (out_file.empty()) {
    std::fwrite(csv.data(), 1, csv.size(), stdout);
  } else {
    write_text_file(out_file, csv);
  }
  return kExitOk;
}

int cmd_render(const std::string& site_file, const std::vector<std::string>& trace_files, const std::string& out_file,
               const std::string& out) {
  const GridSite site = load_site(site_file);
  std::vector<std::vector<TraceEvent>> traces;
  for (const std::string& t : trace_files) traces.push_back(trace_from_jsonl(read_text_file(t)));
  const std::string svg = render_svg(site, traces);
  fs::path target = out_file;
  if (target.empty()) target = prepare_dir(out) / (fs::path(site_file).stem().string() + ".svg");
  write_text_file(target.string(), svg);
  std::printf("wrote %s\n", target.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm search simulator: olfactory and auditory bug algorithms on generated indoor sites"};
  app.require_subcommand(1);

  SiteFlags gen_site;
  int gen_count = 1;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Generate and validate sites");
  gen_site.add_to(gen);
  gen->add_option("--count", gen_count, "Number of sites")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Base seed; site i uses derive_seed(seed, i)")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory");

  SiteFlags run_site;
  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one simulation");
  run_site.add_to(run_cmd);
  run_cmd->add_option("--site", run_flags.site_file, "Site JSON file (otherwise generated from --config)");
  run_cmd->add_option("--site-seed", run_flags.site_seed, "Generator seed when no site file is given");
  run_cmd->add_option("--alg", run_flags.algorithm, "random, minimum, sound, gas or gas_sound")->capture_default_str();
  run_cmd->add_option("--robots", run_flags.robots, "Swarm size")->capture_default_str();
  run_cmd->add_option("--departure", run_flags.departure, "center or edge")->capture_default_str();
  run_cmd->add_option("--seed", run_flags.seed, "Run seed")->capture_default_str();
  run_cmd->add_option("--max-actions", run_flags.max_actions, "Actions per robot (default: preset budget)");
  run_cmd->add_option("--sample-interval", run_flags.sample_interval, "Actions between samples")->capture_default_str();
  run_cmd->add_option("--threshold", run_flags.threshold, "Visits that trigger the reversal")->capture_default_str();
  run_cmd->add_option("--bias", run_flags.bias, "Bias of the initial directions, degrees")->capture_default_str();
  run_cmd->add_flag("--trace", run_flags.trace, "Also write the per-action trace");
  run_cmd->add_option("--name", run_flags.name, "Output file prefix")->capture_default_str();
  run_cmd->add_option("--out", run_flags.out, "Output directory");

  BatchFlags batch_flags;
  CLI::App* batch = app.add_subcommand("batch", "Run an experiment matrix");
  batch->add_option("--matrix", batch_flags.matrix_file, "Matrix JSON file (default: full protocol)");
  batch->add_option("--configs", batch_flags.configs, "Override the site presets");
  batch->add_option("--sites", batch_flags.sites, "Override sites per config");
  auto* seed_opt = batch->add_option("--seed", batch_flags.seed, "Override the base seed");
  batch->add_option("--parallelism", batch_flags.parallelism, "Override the thread count");
  batch->add_option("--out", batch_flags.out, "Output directory");

  std::string stats_archive;
  std::vector<std::string> stats_group_by;
  std::string stats_out;
  CLI::App* stats = app.add_subcommand("stats", "Aggregate a run archive");
  stats->add_option("archive", stats_archive, "runs.jsonl written by batch")->required();
  auto* group_opt = stats->add_option("--group-by", stats_group_by,
                                      "Keys: config, algorithm, n_robots, departure, action_count (default: all)");
  group_opt->expected(0, -1)->delimiter(',');
  stats->add_option("--out", stats_out, "CSV file (default: stdout)");

  std::string render_site;
  std::vector<std::string> render_traces;
  std::string render_file;
  std::string render_out;
  CLI::App* render = app.add_subcommand("render", "Draw a site and robot paths as SVG");
  render->add_option("--site", render_site, "Site JSON file")->required();
  render->add_option("--trace", render_traces, "Trace JSONL file(s)");
  render->add_option("--file", render_file, "SVG path (default: <out>/<site>.svg)");
  render->add_option("--out", render_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_site, gen_count, gen_seed, gen_out);
    if (*run_cmd) return cmd_run(run_site, run_flags);
    if (*batch) {
      batch_flags.seed_set = seed_opt->count() > 0;
      return cmd_batch(batch_flags);
    }
    if (*stats) return cmd_stats(stats_archive, stats_group_by, group_opt->count() > 0, stats_out);
    if (*render) return cmd_render(render_site, render_traces, render_file, render_out);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitUsage;
}
