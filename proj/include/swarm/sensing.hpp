#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "swarm/robot.hpp"
#include "swarm/world.hpp"

namespace swarm {

/// Per-cell visit counters: the shared olfactory substrate. Counts never
/// decrease and there is no decay; every robot's scent is the same.
class ScentField {
 public:
  ScentField(int width, int height);
  explicit ScentField(const GridSite& site) : ScentField(site.width(), site.height()) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint32_t count(Cell c) const { return counts_[index(c)]; }
  std::uint64_t total() const { return total_; }

  /// Increments one free cell. Throws DomainError on walls, BoundsError outside.
  void deposit(const GridSite& site, Cell c);

  nlohmann::json to_json() const;  // rows from y = 0

  friend bool operator==(const ScentField&, const ScentField&) = default;

 private:
  std::size_t index(Cell c) const;

  int width_;
  int height_;
  std::vector<std::uint32_t> counts_;
  std::uint64_t total_ = 0;
};

/// Visit count of a free cell. Throws DomainError on walls.
std::uint32_t smell(const ScentField& field, const GridSite& site, Cell c);

struct AuditoryEntry {
  int robot = 0;
  double distance = 0.0;  // cells
  double azimuth = 0.0;   // degrees in [0, 360), counterclockwise from +x
};

struct AuditoryReading {
  std::vector<AuditoryEntry> neighbors;
};

/// Relative polar position of every other robot. Throws DomainError for an unknown id.
AuditoryReading listen(std::span<const Cell> positions, int listener);

enum class WallSide { None, Left, Right, Both };

struct RangingReading {
  bool wall_ahead = false;
  // For diagonal headings: which of the three forward cells are walls.
  bool wall_ahead_cw = false;    // orthogonal component 45° clockwise of the heading
  bool wall_ahead_ccw = false;   // orthogonal component 45° counterclockwise
  bool wall_ahead_diag = false;  // the diagonal cell itself
  WallSide wall_on_side = WallSide::None;
  std::vector<int> robots_in_contact;  // Chebyshev distance 1
  bool at_outer_corner = false;
  std::vector<int> victims_in_range;   // victim indices within 2 cells
  bool contact_event = false;          // set by the engine: new contact or blocked move
};

inline constexpr double kVictimDetectionRadius = 2.0;

/// Wall, robot, corner and victim detection for robot `robot_index` (index into `robots`).
RangingReading range_scan(const GridSite& site, std::span<const RobotState> robots, std::size_t robot_index);

/// True when moving one step along `heading` from `from` would enter a wall
/// (diagonal moves may not cut between two walls).
bool blocked_by_wall(const GridSite& site, Cell from, Heading heading);

inline double orient(const RobotState& robot) { return robot.pose.heading.degrees(); }

}  // namespace swarm
