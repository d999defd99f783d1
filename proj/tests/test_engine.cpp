#include <doctest.h>

#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "swarm/engine.hpp"
#include "swarm/errors.hpp"
#include "swarm/record_io.hpp"

using namespace swarm;

namespace {

std::shared_ptr<const GridSite> rows_site(std::vector<std::string> rows, std::vector<Room> rooms = {},
                                          std::vector<Victim> victims = {}) {
  return std::make_shared<const GridSite>(GridSite::from_rows(rows, std::move(rooms), std::move(victims)));
}

std::shared_ptr<const GridSite> bare_site(int w, int h) {
  std::vector<std::string> rows(static_cast<std::size_t>(h), "#" + std::string(static_cast<std::size_t>(w - 2), '.') + "#");
  rows.front() = std::string(static_cast<std::size_t>(w), '#');
  rows.back() = std::string(static_cast<std::size_t>(w), '#');
  rows.back()[static_cast<std::size_t>(w / 2)] = '.';
  return rows_site(rows);
}

// A roomless site counts as covered; one corner room keeps runs going.
std::shared_ptr<const GridSite> open_site(int w, int h) {
  auto bare = bare_site(w, h);
  std::vector<std::string> rows;
  for (int y = h - 1; y >= 0; --y) {
    std::string row;
    for (int x = 0; x < w; ++x) row += bare->is_wall({x, y}) ? '#' : '.';
    rows.push_back(row);
  }
  return rows_site(rows, {Room{1, {{1, 1}}, {}, std::nullopt}});
}

SimConfig small_run(AlgorithmKind kind, int n, Departure dep, std::uint64_t seed, bool trace = false) {
  SiteGenParams p = small_config().params;
  p.seed = seed;
  SimConfig c;
  c.site = std::make_shared<const GridSite>(generate(p));
  c.algorithm = kind;
  c.n_robots = n;
  c.departure = dep;
  c.seed = seed * 31 + 7;
  c.record_trace = trace;
  return c;
}

std::uint64_t field_sum(const ScentField& f) {
  std::uint64_t sum = 0;
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) sum += f.count({x, y});
  }
  return sum;
}

}  // namespace

TEST_CASE("place_robots examples") {
  const auto site = open_site(21, 21);
  const auto one = place_robots(*site, 1, Departure::Center);
  REQUIRE(one.size() == 1);
  CHECK(one[0].cell == Cell{10, 10});

  const auto four = place_robots(*site, 4, Departure::Center);
  std::set<Cell> cells;
  for (const Pose& p : four) cells.insert(p.cell);
  CHECK(cells.size() == 4);
  for (std::size_t i = 0; i < four.size(); ++i) CHECK(four[i].heading.degrees() == static_cast<int>(i) * 90);

  const auto edge = place_robots(*site, 2, Departure::Edge);
  REQUIRE(edge.size() == 2);
  for (const Pose& p : edge) {
    CHECK(chebyshev(p.cell, site->entrance().front()) <= 3);
    CHECK_FALSE(site->on_boundary(p.cell));
  }
  CHECK(quantize(initial_direction(1, 3, 0.0)) == place_robots(*site, 3, Departure::Center)[1].heading);
  CHECK_THROWS_AS(place_robots(*site, 0, Departure::Center), DomainError);
  CHECK_THROWS_AS(place_robots(*open_site(5, 5), 12, Departure::Center), InsufficientSpace);
}

TEST_CASE("a lone robot moves one cell along its direction") {
  SimConfig c;
  c.site = open_site(21, 21);
  c.algorithm = AlgorithmKind::Minimum;
  c.n_robots = 1;
  c.bias = 90.0;
  Simulation sim(c);
  REQUIRE(sim.robots()[0].pose.cell == Cell{10, 10});
  sim.step();
  CHECK(sim.robots()[0].pose.cell == Cell{10, 11});
  CHECK(sim.robots()[0].pose.heading.degrees() == 90);
  CHECK(sim.scent().total() == 2);
  CHECK(sim.actions_per_robot() == 1);
}

TEST_CASE("two robots contesting a cell") {
  SimConfig c;
  c.site = open_site(9, 5);
  c.algorithm = AlgorithmKind::Minimum;
  c.n_robots = 2;
  c.record_trace = true;
  c.start_poses = {{{2, 2}, Heading(0)}, {{4, 2}, Heading(4)}};
  Simulation sim(c);
  CHECK(sim.crash_count() == 0);
  sim.step();
  CHECK(sim.robots()[0].pose.cell == Cell{3, 2});
  CHECK(sim.robots()[1].pose.cell == Cell{4, 2});
  CHECK(sim.crash_count() == 1);
  sim.step();
  const auto& trace = *sim.record().trace;
  REQUIRE(trace.size() == 4);
  CHECK(trace[3].robot == 1);
  CHECK(trace[3].trigger == Trigger::HittingOthers);
  CHECK(trace[2].trigger == Trigger::HittingOthers);
  // Both dodge right; staying in contact is the same episode.
  CHECK(sim.crash_count() == 1);
}

TEST_CASE("a blocked move triggers a dodge even inside an episode") {
  SimConfig c;
  c.site = open_site(9, 5);
  c.algorithm = AlgorithmKind::Minimum;
  c.n_robots = 2;
  c.record_trace = true;
  c.start_poses = {{{2, 2}, Heading(0)}, {{3, 2}, Heading(2)}};
  Simulation sim(c);
  sim.step();  // robot 0 bumps into robot 1; robot 1 moves north and stays adjacent
  sim.step();
  const auto& trace = *sim.record().trace;
  CHECK(trace[0].after.cell == Cell{2, 2});
  CHECK(trace[2].trigger == Trigger::HittingOthers);
  CHECK(sim.crash_count() == 0);
}

TEST_CASE("start pose overrides are checked") {
  SimConfig c;
  c.site = open_site(9, 5);
  c.n_robots = 2;
  c.start_poses = {{{2, 2}, Heading(0)}};
  CHECK_THROWS_AS(Simulation{c}, DomainError);
  c.start_poses = {{{2, 2}, Heading(0)}, {{2, 2}, Heading(0)}};
  CHECK_THROWS_AS(Simulation{c}, DomainError);
  c.start_poses = {{{2, 2}, Heading(0)}, {{0, 0}, Heading(0)}};
  CHECK_THROWS_AS(Simulation{c}, DomainError);
}

TEST_CASE("scent total grows by one per new cell crossed") {
  SimConfig c;
  c.site = open_site(12, 5);
  c.algorithm = AlgorithmKind::UsingGas;
  c.n_robots = 1;
  c.start_poses = {{{1, 2}, Heading(0)}};
  Simulation sim(c);
  const std::uint64_t before = field_sum(sim.scent());
  for (int i = 0; i < 5; ++i) sim.step();
  CHECK(sim.robots()[0].pose.cell == Cell{6, 2});
  CHECK(field_sum(sim.scent()) == before + 5);
}

TEST_CASE("scent conservation and world invariants on generated sites") {
  for (AlgorithmKind kind : kAllAlgorithms) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      SimConfig c = small_run(kind, 6, seed % 2 ? Departure::Edge : Departure::Center, seed);
      c.max_actions_per_robot = 300;
      Simulation sim(c);
      double last_cov = 0.0;
      while (!sim.finished()) {
        sim.step();
        REQUIRE(field_sum(sim.scent()) == sim.cell_entries());
        REQUIRE(sim.scent().total() == sim.cell_entries());
        std::set<Cell> occupied;
        for (const RobotState& r : sim.robots()) {
          REQUIRE(sim.site().is_free(r.pose.cell));
          REQUIRE(occupied.insert(r.pose.cell).second);
        }
        REQUIRE(sim.total_coverage() >= last_cov);
        last_cov = sim.total_coverage();
      }
      const RunRecord& rec = sim.record();
      REQUIRE(rec.actions_per_robot <= 300);
      for (std::size_t i = 1; i < rec.samples.size(); ++i) {
        REQUIRE(rec.samples[i].total_coverage >= rec.samples[i - 1].total_coverage);
        REQUIRE(rec.samples[i].crash_count >= rec.samples[i - 1].crash_count);
      }
    }
  }
}

TEST_CASE("trace replay reproduces poses, scent and smell") {
  for (AlgorithmKind kind : {AlgorithmKind::UsingGas, AlgorithmKind::UsingGasAndSound, AlgorithmKind::Random}) {
    for (std::uint64_t seed = 10; seed < 13; ++seed) {
      SimConfig c = small_run(kind, 8, Departure::Center, seed, true);
      Simulation sim(c);
      const RunRecord rec = sim.run();
      const auto& trace = *rec.trace;

      const std::vector<Pose> replayed = replay_poses(sim.site(), rec.initial_poses, trace);
      REQUIRE(replayed.size() == trace.size());
      for (std::size_t k = 0; k < trace.size(); ++k) REQUIRE(replayed[k] == trace[k].after);

      // Recount entries from the trace alone.
      std::vector<std::uint32_t> counts(static_cast<std::size_t>(sim.site().width() * sim.site().height()), 0);
      std::vector<std::uint32_t> arrival(rec.initial_poses.size(), 0);
      for (std::size_t i = 0; i < rec.initial_poses.size(); ++i) {
        arrival[i] = counts[sim.site().index(rec.initial_poses[i].cell)]++;
      }
      for (const TraceEvent& e : trace) {
        if (e.smell) REQUIRE(*e.smell == arrival[static_cast<std::size_t>(e.robot)]);
        if (e.after.cell != e.before.cell) {
          arrival[static_cast<std::size_t>(e.robot)] = counts[sim.site().index(e.after.cell)]++;
        }
      }
      for (int y = 0; y < sim.site().height(); ++y) {
        for (int x = 0; x < sim.site().width(); ++x) {
          REQUIRE(sim.scent().count({x, y}) == counts[sim.site().index({x, y})]);
        }
      }
    }
  }
}

TEST_CASE("runs are deterministic") {
  for (AlgorithmKind kind : kAllAlgorithms) {
    const SimConfig c = small_run(kind, 4, Departure::Edge, 3, true);
    const RunRecord a = run(c);
    const RunRecord b = run(c);
    CHECK(a == b);
    const RunKey key{"small", 3, kind, 4, Departure::Edge, c.seed};
    CHECK(summary_to_json(key, c, a).dump() == summary_to_json(key, c, b).dump());
    CHECK(samples_to_jsonl(a) == samples_to_jsonl(b));
    CHECK(trace_to_jsonl(*a.trace) == trace_to_jsonl(*b.trace));
    CHECK(trace_from_jsonl(trace_to_jsonl(*a.trace)) == *a.trace);
  }
}

TEST_CASE("samples every interval up to the budget") {
  SimConfig c = small_run(AlgorithmKind::Minimum, 2, Departure::Center, 21);
  const RunRecord rec = run(c);
  REQUIRE(!rec.samples.empty());
  if (!rec.terminated_early) {
    REQUIRE(rec.samples.size() == 10);
    for (std::size_t i = 0; i < rec.samples.size(); ++i) CHECK(rec.samples[i].action_count == static_cast<int>(i + 1) * 100);
    CHECK(rec.actions_per_robot == 1000);
  }
  CHECK(rec.final_coverage == rec.samples.back().total_coverage);
  CHECK(rec.samples.back().per_robot_coverage.size() == 2);
}

TEST_CASE("early termination on single-room sites") {
  SUBCASE("the room holds the start cells") {
    std::vector<Cell> interior;
    for (int y = 1; y <= 5; ++y) {
      for (int x = 1; x <= 7; ++x) interior.push_back({x, y});
    }
    SimConfig c;
    c.site = rows_site({"#########", "#.......#", "#.......#", "#.......#", "#.......#", "#.......#", "####.####"},
                       {Room{1, interior, {}, std::nullopt}});
    c.n_robots = 2;
    const RunRecord rec = run(c);
    CHECK(rec.terminated_early);
    CHECK(rec.final_coverage == 1.0);
    CHECK(rec.samples.size() == 1);
    CHECK(rec.actions_per_robot == 0);
  }
  SUBCASE("the room must be walked into") {
    SimConfig c;
    c.site = rows_site({"###########", "#.........#", "#.........#", "#.........#", "#####.#####"},
                       {Room{1, {{9, 2}}, {}, std::nullopt}});
    c.algorithm = AlgorithmKind::Minimum;
    c.n_robots = 1;
    c.start_poses = {{{2, 2}, Heading(0)}};
    const RunRecord rec = run(c);
    CHECK(rec.terminated_early);
    CHECK(rec.actions_per_robot == 7);
    CHECK(rec.samples.back().action_count == 7);
    CHECK(rec.final_coverage == 1.0);
  }
}

TEST_CASE("room entry marks the parent of a nested room") {
  SimConfig c;
  c.site = rows_site({"##########", "#........#", "#........#", "#........#", "####.#####"},
                     {Room{1, {{5, 3}, {6, 3}, {7, 3}}, {}, std::nullopt}, Room{2, {{7, 2}}, {}, 1},
                      Room{3, {{1, 1}}, {}, std::nullopt}});
  c.algorithm = AlgorithmKind::Minimum;
  c.n_robots = 1;
  c.start_poses = {{{3, 2}, Heading(0)}};
  c.max_actions_per_robot = 4;
  const RunRecord rec = run(c);
  CHECK(rec.rooms_entered == 2);
  CHECK(rec.final_coverage == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("victims are marked when a robot comes within range") {
  SimConfig c;
  c.site = rows_site({"###########", "#.........#", "#.........#", "#.........#", "#####.#####"},
                     {Room{1, {{1, 1}}, {}, std::nullopt}}, {Victim{{8, 2}}});
  c.algorithm = AlgorithmKind::Minimum;
  c.n_robots = 1;
  c.start_poses = {{{2, 2}, Heading(0)}};
  c.max_actions_per_robot = 10;
  const RunRecord rec = run(c);
  REQUIRE(rec.victims_found.size() == 1);
  CHECK(rec.victims_found[0] == VictimFind{0, 4});
}

TEST_CASE("coverage examples") {
  const auto site = rows_site({"#######", "#.....#", "###.###"},
                              {Room{1, {{1, 1}}, {}, std::nullopt}, Room{2, {{5, 1}}, {}, std::nullopt}});
  CHECK(coverage(*site, {}) == 0.0);
  CHECK(coverage(*site, {1, 2}) == 1.0);
  CHECK(coverage(*site, {2, 2}) == 0.5);
  CHECK_THROWS_AS(coverage(*site, {9}), DomainError);
  CHECK(coverage(*bare_site(6, 6), {}) == 1.0);

  // Six runs entering 91 of 18 rooms in total average 15.167 rooms.
  std::vector<Room> rooms;
  std::vector<std::string> rows{std::string(38, '#'), "#" + std::string(36, '.') + "#", std::string(38, '#')};
  rows.back()[1] = '.';
  for (int i = 0; i < 18; ++i) rooms.push_back(Room{i, {{2 * i + 1, 1}}, {}, std::nullopt});
  const auto eighteen = rows_site(rows, rooms);
  const int entered[6] = {15, 16, 15, 15, 15, 15};
  double sum = 0.0;
  for (int k : entered) {
    std::vector<int> ids(static_cast<std::size_t>(k));
    std::iota(ids.begin(), ids.end(), 0);
    sum += coverage(*eighteen, ids);
  }
  CHECK(sum / 6.0 * 100.0 == doctest::Approx(84.26).epsilon(1e-4));
}

TEST_CASE("stepping a finished run is a contract violation") {
  SimConfig c;
  c.site = bare_site(9, 9);
  c.n_robots = 1;
  Simulation sim(c);
  CHECK(sim.finished());  // no rooms: full coverage at deployment
  CHECK_THROWS_AS(sim.step(), ContractViolation);
}
