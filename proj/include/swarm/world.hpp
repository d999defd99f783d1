#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarm/geometry.hpp"

namespace swarm {

/// Physical edge length of one grid cell, metres (metadata only; all logic is in cells).
inline constexpr double kCellSizeMeters = 4.0 / 15.0;

enum class CellKind : std::uint8_t { Wall, Free };

struct Room {
  int id = 0;
  std::vector<Cell> interior;
  std::vector<Cell> doors;
  std::optional<int> parent;

  friend bool operator==(const Room&, const Room&) = default;
};

struct Victim {
  Cell position;

  friend bool operator==(const Victim&, const Victim&) = default;
};

/// The static site: an enclosed wall/free grid with rooms, one entrance and
/// optional victims. Immutable once built; safe to share across threads.
class GridSite {
 public:
  GridSite(int width, int height, std::vector<CellKind> cells, std::vector<Cell> entrance,
           std::vector<Room> rooms, std::vector<Victim> victims, std::uint64_t seed = 0);

  /// Builds a site from text rows, first row = top (highest y). '#' is wall,
  /// anything else free. The entrance is taken to be every free boundary cell.
  static GridSite from_rows(std::span<const std::string> rows, std::vector<Room> rooms = {},
                            std::vector<Victim> victims = {}, std::uint64_t seed = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint64_t seed() const { return seed_; }
  double area_m2() const { return width_ * height_ * kCellSizeMeters * kCellSizeMeters; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool on_boundary(Cell c) const {
    return in_bounds(c) && (c.x == 0 || c.y == 0 || c.x == width_ - 1 || c.y == height_ - 1);
  }

  /// Throws BoundsError outside the grid.
  CellKind at(Cell c) const;
  /// Out-of-bounds cells read as wall.
  bool is_wall(Cell c) const { return !in_bounds(c) || cells_[index(c)] == CellKind::Wall; }
  bool is_free(Cell c) const { return !is_wall(c); }

  std::span<const CellKind> cells() const { return cells_; }
  const std::vector<Cell>& entrance() const { return entrance_; }
  const std::vector<Room>& rooms() const { return rooms_; }
  const std::vector<Victim>& victims() const { return victims_; }

  /// Position in rooms() of the room whose interior holds the cell, or -1.
  int room_index(Cell c) const { return in_bounds(c) ? owner_[index(c)] : -1; }
  /// Position in rooms() of the room with the given id, or -1.
  int index_of_room(int id) const;

  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
  }

  friend bool operator==(const GridSite& a, const GridSite& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.seed_ == b.seed_ && a.cells_ == b.cells_ &&
           a.entrance_ == b.entrance_ && a.rooms_ == b.rooms_ && a.victims_ == b.victims_;
  }

 private:
  int width_;
  int height_;
  std::vector<CellKind> cells_;
  std::vector<Cell> entrance_;
  std::vector<Room> rooms_;
  std::vector<Victim> victims_;
  std::uint64_t seed_;
  std::vector<int> owner_;
};

enum class CornerKind { Inner, Outer, NotACorner };

/// Classifies a wall cell where two straight wall runs meet at a right angle.
/// Outer when a free cell sits on the reflex (270°) side, Inner when only the
/// cell between the two runs is free.
CornerKind classify_corner(const GridSite& site, Cell wall_vertex);

/// Same, as seen from a free cell 8-adjacent to the vertex.
CornerKind classify_corner(const GridSite& site, Cell wall_vertex, Cell from);

/// Groups of room ids whose walls form a structure detached from the outer
/// boundary walls (8-connectivity). Each group sorted; groups ordered by first id.
std::vector<std::vector<int>> find_islands(const GridSite& site);

enum class ViolationKind {
  NoEntrance,
  MultipleEntrances,
  EntranceWidth,
  EntranceMismatch,
  UnreachableCell,
  DuplicateRoomId,
  EmptyRoom,
  RoomInteriorNotFree,
  RoomOverlap,
  RoomDisconnected,
  BadDoor,
  BadParent,
  NestingViolation,
  VictimNotFree,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::optional<Cell> cell;
  std::optional<int> room;
  std::string detail;
};

/// Every broken site invariant; empty means valid.
std::vector<Violation> validate_site(const GridSite& site);

/// Innermost room containing a free cell; nullopt for blank space.
/// Throws DomainError for wall cells and BoundsError outside the grid.
std::optional<int> room_of(const GridSite& site, Cell cell);

}  // namespace swarm
