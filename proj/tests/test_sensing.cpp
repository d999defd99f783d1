#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "swarm/errors.hpp"
#include "swarm/rng.hpp"
#include "swarm/sensing.hpp"

using namespace swarm;

namespace {

GridSite open_site(int w, int h) {
  std::vector<std::string> rows(static_cast<std::size_t>(h), "#" + std::string(static_cast<std::size_t>(w - 2), '.') + "#");
  rows.front() = std::string(static_cast<std::size_t>(w), '#');
  rows.back() = std::string(static_cast<std::size_t>(w), '#');
  rows.back()[2] = '.';
  return GridSite::from_rows(rows);
}

RobotState robot_at(int id, Cell c, int heading_deg) {
  RobotState r;
  r.id = id;
  r.pose = {c, Heading::from_degrees_exact(heading_deg)};
  return r;
}

}  // namespace

TEST_CASE("deposit and smell") {
  const GridSite site = open_site(10, 10);
  ScentField field(site);
  CHECK(smell(field, site, {3, 4}) == 0);
  field.deposit(site, {3, 4});
  CHECK(field.count({3, 4}) == 1);
  CHECK(smell(field, site, {3, 4}) == 1);
  field.deposit(site, {3, 4});
  CHECK(smell(field, site, {3, 4}) == 2);
  CHECK(field.count({4, 4}) == 0);
  CHECK(field.total() == 2);
  CHECK_THROWS_AS(field.deposit(site, {0, 0}), DomainError);
  CHECK_THROWS_AS(smell(field, site, {0, 5}), DomainError);
  CHECK_THROWS_AS(field.deposit(site, {20, 5}), BoundsError);
  CHECK(field.to_json()[4][3] == 2);
}

TEST_CASE("listen examples") {
  const std::vector<Cell> east{{0, 0}, {1, 0}};
  const AuditoryReading a = listen(east, 0);
  REQUIRE(a.neighbors.size() == 1);
  CHECK(a.neighbors[0].robot == 1);
  CHECK(a.neighbors[0].distance == doctest::Approx(1.0));
  CHECK(a.neighbors[0].azimuth == doctest::Approx(0.0));

  const std::vector<Cell> tri{{2, 2}, {5, 6}};
  const AuditoryReading b = listen(tri, 0);
  CHECK(b.neighbors[0].distance == doctest::Approx(5.0));
  CHECK(b.neighbors[0].azimuth == doctest::Approx(53.130102).epsilon(1e-6));

  const std::vector<Cell> three{{0, 0}, {4, 1}, {-2, 3}};
  CHECK(listen(three, 2).neighbors.size() == 2);
  CHECK_THROWS_AS(listen(three, 3), DomainError);
  CHECK_THROWS_AS(listen(three, -1), DomainError);
}

TEST_CASE("listen is antisymmetric") {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Cell> pos;
    for (int k = 0; k < 5; ++k) pos.push_back({rng.range(-20, 20), rng.range(-20, 20)});
    for (int i = 0; i < 5; ++i) {
      for (const AuditoryEntry& e : listen(pos, i).neighbors) {
        if (pos[static_cast<std::size_t>(i)] == pos[static_cast<std::size_t>(e.robot)]) continue;
        for (const AuditoryEntry& back : listen(pos, e.robot).neighbors) {
          if (back.robot != i) continue;
          CHECK(back.distance == e.distance);
          CHECK(angular_distance(back.azimuth, e.azimuth) == doctest::Approx(180.0).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("range_scan walls, robots and victims") {
  const GridSite site = open_site(8, 8);
  std::vector<RobotState> robots{robot_at(0, {1, 3}, 180), robot_at(1, {2, 4}, 0), robot_at(2, {5, 5}, 90)};
  const RangingReading r0 = range_scan(site, robots, 0);
  CHECK(r0.wall_ahead);
  CHECK(r0.robots_in_contact == std::vector<int>{1});
  CHECK(r0.wall_on_side == WallSide::None);
  const RangingReading r1 = range_scan(site, robots, 1);
  CHECK_FALSE(r1.wall_ahead);
  CHECK(r1.robots_in_contact == std::vector<int>{0});
  CHECK(range_scan(site, robots, 2).robots_in_contact.empty());

  // Diagonal heading into a corner pocket.
  robots = {robot_at(0, {1, 1}, 225)};
  const RangingReading d = range_scan(site, robots, 0);
  CHECK(d.wall_ahead);
  CHECK(d.wall_ahead_cw);
  CHECK(d.wall_ahead_ccw);
  CHECK(d.wall_ahead_diag);
  // Heading north along the west wall: the wall is on the left.
  robots = {robot_at(0, {1, 3}, 90)};
  CHECK(range_scan(site, robots, 0).wall_on_side == WallSide::Left);
  CHECK_THROWS_AS(range_scan(site, robots, 1), DomainError);

  const GridSite with_victim = GridSite::from_rows(std::vector<std::string>{"#######", "#.....#", "#.....#", "#.....#", "##.####"}, {},
                                                   {Victim{{5, 3}}});
  robots = {robot_at(0, {3, 3}, 0)};
  CHECK(range_scan(with_victim, robots, 0).victims_in_range == std::vector<int>{0});
  robots = {robot_at(0, {3, 1}, 0)};
  CHECK(range_scan(with_victim, robots, 0).victims_in_range.empty());
}

TEST_CASE("diagonal moves may not cut corners") {
  const GridSite site = GridSite::from_rows(std::vector<std::string>{"#####", "#...#", "#.#.#", "#...#", "##.##"});
  CHECK(blocked_by_wall(site, {1, 1}, Heading(1)));   // (2,2) is wall
  CHECK(blocked_by_wall(site, {1, 3}, Heading(7)));   // diagonal cell is wall
  CHECK(blocked_by_wall(site, {1, 2}, Heading(1)));   // east neighbour is wall
  CHECK_FALSE(blocked_by_wall(site, {1, 1}, Heading(0)));
  CHECK_FALSE(blocked_by_wall(site, {1, 1}, Heading(2)));
}

// The outer corner fires exactly when the followed wall ends at the robot's
// position after a straight step. Checked against the geometric definition on
// every cardinal heading, both sides and all wall patterns around the robot.
TEST_CASE("at_outer_corner matches the geometric definition on all templates") {
  int fired = 0;
  for (int h = 0; h < 8; h += 2) {
    for (Side side : {Side::Left, Side::Right}) {
      for (int mask = 0; mask < 256; ++mask) {
        for (bool advanced : {false, true}) {
          // 5x5 grid, robot in the middle; the 8 ring cells follow the mask.
          std::vector<CellKind> cells(25, CellKind::Free);
          static constexpr Cell ring[8] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
          for (int k = 0; k < 8; ++k) {
            if (mask & (1 << k)) cells[static_cast<std::size_t>((2 + ring[k].y) * 5 + 2 + ring[k].x)] = CellKind::Wall;
          }
          const GridSite site(5, 5, cells, {}, {}, {});
          RobotState r = robot_at(0, {2, 2}, h * 45);
          r.fsm = FsmState::FollowingWall;
          r.follow_side = side;
          r.advanced_last = advanced;
          const std::vector<RobotState> robots{r};
          const Heading heading(h);
          const Cell s = heading.side_step(side);
          const Cell back = Cell{2, 2} - heading.step();
          const bool expected = advanced && site.is_free(Cell{2, 2} + s) && site.is_wall(back + s);
          REQUIRE(range_scan(site, robots, 0).at_outer_corner == expected);
          fired += expected ? 1 : 0;
        }
      }
    }
  }
  CHECK(fired > 0);

  // Just-started robots and diagonal headings never sense an outer corner.
  const GridSite site = open_site(6, 6);
  RobotState r = robot_at(0, {2, 2}, 45);
  r.fsm = FsmState::FollowingWall;
  r.follow_side = Side::Right;
  r.advanced_last = true;
  std::vector<RobotState> robots{r};
  CHECK_FALSE(range_scan(site, robots, 0).at_outer_corner);
}

TEST_CASE("orient reads the heading") {
  RobotState r = robot_at(0, {1, 1}, 90);
  CHECK(orient(r) == 90.0);
  r.pose.heading = quantize(225.0);
  CHECK(orient(r) == 225.0);
}
