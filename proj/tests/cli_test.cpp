// Drives the swarmsearch binary end to end and checks files and exit codes.
// Usage: cli_test <path-to-swarmsearch> <scratch-dir>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_bin;
fs::path g_work;
int g_failed = 0;

int sh(const std::string& args, const std::string& env = "") {
  const std::string cmd = "cd '" + g_work.string() + "' && " + env + " '" + g_bin + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void expect(bool ok, const std::string& what) {
  std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
  if (!ok) ++g_failed;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: cli_test <swarmsearch> <scratch-dir>\n";
    return 2;
  }
  g_bin = fs::absolute(argv[1]).string();
  g_work = fs::absolute(argv[2]);
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  expect(sh("gen --config small --count 5 --seed 1 --out g1") == 0, "gen exits 0");
  expect(sh("gen --config small --count 5 --seed 1 --out g2") == 0, "gen rerun exits 0");
  bool same = true;
  for (int i = 0; i < 5; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "site_%04d.json", i);
    same = same && fs::exists(g_work / "g1" / name) && slurp(g_work / "g1" / name) == slurp(g_work / "g2" / name);
  }
  expect(same, "gen is reproducible file by file");
  expect(sh("gen --rooms 0 --count 1 --out g0") == 0, "gen with no rooms");
  expect(sh("gen --width 20 --height 10 --rooms 0 --count 1 --out gs") == 0, "gen a small empty site");
  expect(sh("gen --width 12 --height 12 --rooms 200 --count 1 --out bad") == 2, "infeasible gen exits 2");

  expect(sh("run --site g1/site_0000.json --alg gas_sound --robots 4 --departure edge --trace --name r1 --out runs") == 0,
         "run exits 0");
  expect(sh("run --site g1/site_0000.json --alg gas_sound --robots 4 --departure edge --trace --name r2 --out runs") == 0,
         "run again");
  expect(fs::exists(g_work / "runs" / "r1_summary.json") && fs::exists(g_work / "runs" / "r1_samples.jsonl") &&
             fs::exists(g_work / "runs" / "r1_trace.jsonl"),
         "run writes summary, samples and trace");
  expect(slurp(g_work / "runs" / "r1_samples.jsonl") == slurp(g_work / "runs" / "r2_samples.jsonl") &&
             slurp(g_work / "runs" / "r1_trace.jsonl") == slurp(g_work / "runs" / "r2_trace.jsonl"),
         "identical runs give identical outputs");
  expect(slurp(g_work / "runs" / "r1_samples.jsonl").find("\"action_count\":100") != std::string::npos,
         "samples every 100 actions");
  expect(sh("run --alg teleport") == 1, "unknown algorithm exits 1");
  expect(sh("run --departure nowhere") == 1, "unknown departure exits 1");
  expect(sh("run --bogus-flag") == 1, "unknown flag exits 1");
  expect(sh("run --site missing.json") == 2, "missing site file exits 2");

  expect(sh("run --config small --site-seed 2 --robots 2 --max-actions 100 --name envrun", "SWARMSEARCH_OUT_DIR=envout") == 0 &&
             fs::exists(g_work / "envout" / "envrun_summary.json"),
         "output directory from the environment");
  expect(sh("run --config small --site-seed 2 --robots 2 --max-actions 100 --name flagrun --out flagout",
            "SWARMSEARCH_OUT_DIR=envout") == 0 &&
             fs::exists(g_work / "flagout" / "flagrun_summary.json"),
         "--out beats the environment");

  {
    std::ofstream m(g_work / "matrix.json");
    m << R"({"configs": [{"name": "quick", "base": "small", "max_actions_per_robot": 150}],
             "sites_per_config": 2, "algorithms": ["minimum", "gas"], "robot_counts": [2, 3],
             "departures": ["center"], "base_seed": 5})";
  }
  expect(sh("batch --matrix matrix.json --parallelism 1 --out b1") == 0, "batch exits 0");
  expect(sh("batch --matrix matrix.json --parallelism 8 --out b8") == 0, "parallel batch exits 0");
  expect(slurp(g_work / "b1" / "results.csv") == slurp(g_work / "b8" / "results.csv") &&
             slurp(g_work / "b1" / "runs.jsonl") == slurp(g_work / "b8" / "runs.jsonl"),
         "batch output independent of parallelism");
  expect(!slurp(g_work / "b1" / "results.csv").empty(), "batch CSV non-empty");

  expect(sh("stats b1/runs.jsonl --out stats.csv") == 0 &&
             slurp(g_work / "stats.csv") == slurp(g_work / "b1" / "results.csv"),
         "stats reproduces the batch CSV");
  expect(sh("stats b1/runs.jsonl --group-by algorithm --out by_alg.csv") == 0, "stats with one key");
  expect(sh("stats b1/runs.jsonl --group-by ''") == 1, "empty group set exits 1");
  {
    std::ofstream empty(g_work / "empty.jsonl");
  }
  expect(sh("stats empty.jsonl") == 1, "empty archive exits 1");

  {
    std::ofstream m(g_work / "broken.json");
    m << R"({"configs": [{"name": "cramped", "width": 12, "height": 12, "rooms": 200}],
             "sites_per_config": 1, "algorithms": ["gas"], "robot_counts": [2], "departures": ["center"]})";
  }
  expect(sh("batch --matrix broken.json --out bb") == 3, "failed runs exit 3");
  expect(!slurp(g_work / "bb" / "errors.jsonl").empty(), "errors sidecar written");

  expect(sh("render --site g1/site_0000.json --file site.svg") == 0, "render site");
  expect(sh("render --site g1/site_0000.json --trace runs/r1_trace.jsonl --file paths.svg") == 0, "render with trace");
  expect(slurp(g_work / "paths.svg").find("<polyline") != std::string::npos, "paths drawn");
  expect(sh("render --site gs/site_0000.json --trace runs/r1_trace.jsonl --file mismatch.svg") == 2,
         "trace from another site exits 2");
  expect(sh("") == 1, "no subcommand exits 1");

  std::cout << (g_failed == 0 ? "all CLI checks passed\n" : "CLI checks failed\n");
  return g_failed == 0 ? 0 : 1;
}
