#include "swarm/sensing.hpp"

#include <cmath>
#include <numbers>

#include "swarm/errors.hpp"

namespace swarm {

std::string_view to_string(FsmState s) {
  return s == FsmState::JustStarted ? "just_started" : "following_wall";
}

ScentField::ScentField(int width, int height)
    : width_(width), height_(height), counts_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0) {
  if (width <= 0 || height <= 0) throw DomainError("scent field dimensions must be positive");
}

std::size_t ScentField::index(Cell c) const {
  if (c.x < 0 || c.y < 0 || c.x >= width_ || c.y >= height_) throw BoundsError("scent cell outside the field");
  return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
}

void ScentField::deposit(const GridSite& site, Cell c) {
  if (site.at(c) == CellKind::Wall) throw DomainError("cannot deposit scent on a wall");
  ++counts_[index(c)];
  ++total_;
}

nlohmann::json ScentField::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int y = 0; y < height_; ++y) {
    nlohmann::json row = nlohmann::json::array();
    for (int x = 0; x < width_; ++x) row.push_back(counts_[index({x, y})]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::uint32_t smell(const ScentField& field, const GridSite& site, Cell c) {
  if (site.at(c) == CellKind::Wall) throw DomainError("cannot smell a wall cell");
  return field.count(c);
}

AuditoryReading listen(std::span<const Cell> positions, int listener) {
  if (listener < 0 || static_cast<std::size_t>(listener) >= positions.size()) {
    throw DomainError("unknown robot id " + std::to_string(listener));
  }
  const Cell self = positions[static_cast<std::size_t>(listener)];
  AuditoryReading reading;
  reading.neighbors.reserve(positions.size() - 1);
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (static_cast<int>(j) == listener) continue;
    const double dx = positions[j].x - self.x;
    const double dy = positions[j].y - self.y;
    const double azimuth = normalize_degrees(std::atan2(dy, dx) * 180.0 / std::numbers::pi);
    reading.neighbors.push_back({static_cast<int>(j), std::hypot(dx, dy), azimuth});
  }
  return reading;
}

bool blocked_by_wall(const GridSite& site, Cell from, Heading heading) {
  const Cell step = heading.step();
  if (site.is_wall(from + step)) return true;
  if (heading.cardinal()) return false;
  return site.is_wall(from + Cell{step.x, 0}) || site.is_wall(from + Cell{0, step.y});
}

RangingReading range_scan(const GridSite& site, std::span<const RobotState> robots, std::size_t robot_index) {
  if (robot_index >= robots.size()) throw DomainError("unknown robot index");
  const RobotState& self = robots[robot_index];
  const Cell p = self.pose.cell;
  const Heading h = self.pose.heading;
  RangingReading r;

  r.wall_ahead = blocked_by_wall(site, p, h);
  if (!h.cardinal()) {
    r.wall_ahead_cw = site.is_wall(p + h.rotated(-1).step());
    r.wall_ahead_ccw = site.is_wall(p + h.rotated(1).step());
    r.wall_ahead_diag = site.is_wall(p + h.step());
  }

  const bool left = site.is_wall(p + h.side_step(Side::Left));
  const bool right = site.is_wall(p + h.side_step(Side::Right));
  r.wall_on_side = left && right ? WallSide::Both : left ? WallSide::Left : right ? WallSide::Right : WallSide::None;

  for (std::size_t j = 0; j < robots.size(); ++j) {
    if (j != robot_index && chebyshev(robots[j].pose.cell, p) <= 1) r.robots_in_contact.push_back(robots[j].id);
  }

  // The followed wall ends here: the side cell opened up right after a straight
  // advance, while the side cell one step back is still wall.
  if (self.fsm == FsmState::FollowingWall && self.follow_side && h.cardinal() && self.advanced_last) {
    const Cell side = h.side_step(*self.follow_side);
    r.at_outer_corner = site.is_free(p + side) && site.is_wall(p - h.step() + side);
  }

  for (std::size_t v = 0; v < site.victims().size(); ++v) {
    if (euclidean(site.victims()[v].position, p) <= kVictimDetectionRadius) r.victims_in_range.push_back(static_cast<int>(v));
  }
  return r;
}

}  // namespace swarm
