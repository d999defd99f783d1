#include "swarm/world.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "swarm/errors.hpp"

namespace swarm {

namespace {

constexpr std::array<Cell, 4> kOrth{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
constexpr std::array<Cell, 8> kRing{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

std::string cell_text(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

int room_depth(const std::vector<Room>& rooms, std::size_t i) {
  int depth = 0;
  std::optional<int> parent = rooms[i].parent;
  while (parent && depth <= static_cast<int>(rooms.size())) {
    auto it = std::find_if(rooms.begin(), rooms.end(), [&](const Room& r) { return r.id == *parent; });
    if (it == rooms.end()) break;
    parent = it->parent;
    ++depth;
  }
  return depth;
}

}  // namespace

GridSite::GridSite(int width, int height, std::vector<CellKind> cells, std::vector<Cell> entrance,
                   std::vector<Room> rooms, std::vector<Victim> victims, std::uint64_t seed)
    : width_(width),
      height_(height),
      cells_(std::move(cells)),
      entrance_(std::move(entrance)),
      rooms_(std::move(rooms)),
      victims_(std::move(victims)),
      seed_(seed) {
  if (width_ <= 0 || height_ <= 0) throw ValidationError("site dimensions must be positive");
  if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw ValidationError("cell count does not match site dimensions");
  }
  owner_.assign(cells_.size(), -1);

  // Deeper rooms are written last so overlapping nests resolve to the innermost.
  std::vector<std::size_t> order(rooms_.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> depth(rooms_.size());
  for (std::size_t i = 0; i < rooms_.size(); ++i) depth[i] = room_depth(rooms_, i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return depth[a] < depth[b]; });
  for (std::size_t i : order) {
    for (Cell c : rooms_[i].interior) {
      if (in_bounds(c)) owner_[index(c)] = static_cast<int>(i);
    }
  }
}

GridSite GridSite::from_rows(std::span<const std::string> rows, std::vector<Room> rooms,
                             std::vector<Victim> victims, std::uint64_t seed) {
  if (rows.empty()) throw ValidationError("no rows");
  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows.front().size());
  std::vector<CellKind> cells(static_cast<std::size_t>(width * height), CellKind::Wall);
  for (int row = 0; row < height; ++row) {
    const std::string& text = rows[static_cast<std::size_t>(row)];
    if (static_cast<int>(text.size()) != width) throw ValidationError("ragged rows");
    const int y = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      cells[static_cast<std::size_t>(y * width + x)] = text[static_cast<std::size_t>(x)] == '#' ? CellKind::Wall : CellKind::Free;
    }
  }
  std::vector<Cell> entrance;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const bool edge = x == 0 || y == 0 || x == width - 1 || y == height - 1;
      if (edge && cells[static_cast<std::size_t>(y * width + x)] == CellKind::Free) entrance.push_back({x, y});
    }
  }
  return GridSite(width, height, std::move(cells), std::move(entrance), std::move(rooms), std::move(victims), seed);
}

CellKind GridSite::at(Cell c) const {
  if (!in_bounds(c)) throw BoundsError("cell " + cell_text(c) + " outside the site");
  return cells_[index(c)];
}

int GridSite::index_of_room(int id) const {
  for (std::size_t i = 0; i < rooms_.size(); ++i) {
    if (rooms_[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

// --- corners -----------------------------------------------------------------

namespace {

struct CornerArms {
  bool is_corner = false;
  Cell acute;  // the cell between the two arms
};

CornerArms corner_arms(const GridSite& site, Cell v) {
  if (!site.in_bounds(v)) throw BoundsError("corner vertex " + cell_text(v) + " outside the site");
  if (site.at(v) != CellKind::Wall) throw DomainError("corner vertex " + cell_text(v) + " is not a wall cell");
  std::array<bool, 4> arm{};
  int count = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    const Cell n = v + kOrth[k];
    arm[k] = site.in_bounds(n) && site.at(n) == CellKind::Wall;
    count += arm[k] ? 1 : 0;
  }
  if (count != 2) return {};
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t next = (k + 1) % 4;
    if (arm[k] && arm[next]) return {true, v + kOrth[k] + kOrth[next]};
  }
  return {};  // two opposite arms: straight run
}

}  // namespace

CornerKind classify_corner(const GridSite& site, Cell wall_vertex) {
  const CornerArms arms = corner_arms(site, wall_vertex);
  if (!arms.is_corner) return CornerKind::NotACorner;
  bool reflex_free = false;
  for (Cell d : kRing) {
    const Cell n = wall_vertex + d;
    if (n == arms.acute || !site.in_bounds(n)) continue;
    if (site.at(n) == CellKind::Free) reflex_free = true;
  }
  if (reflex_free) return CornerKind::Outer;
  if (site.is_free(arms.acute)) return CornerKind::Inner;
  return CornerKind::NotACorner;
}

CornerKind classify_corner(const GridSite& site, Cell wall_vertex, Cell from) {
  const CornerArms arms = corner_arms(site, wall_vertex);
  if (!site.in_bounds(from)) throw BoundsError("query cell " + cell_text(from) + " outside the site");
  if (chebyshev(from, wall_vertex) != 1 || site.at(from) != CellKind::Free) {
    throw DomainError("query cell must be a free 8-neighbour of the vertex");
  }
  if (!arms.is_corner) return CornerKind::NotACorner;
  return from == arms.acute ? CornerKind::Inner : CornerKind::Outer;
}

// --- islands -----------------------------------------------------------------

std::vector<std::vector<int>> find_islands(const GridSite& site) {
  const int w = site.width();
  const int h = site.height();
  std::vector<int> label(static_cast<std::size_t>(w * h), -1);
  std::vector<bool> touches_boundary;
  std::vector<Cell> stack;
  int next_label = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Cell start{x, y};
      if (!site.is_wall(start) || label[site.index(start)] >= 0) continue;
      bool boundary = false;
      label[site.index(start)] = next_label;
      stack.assign(1, start);
      while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        boundary = boundary || site.on_boundary(c);
        for (Cell d : kRing) {
          const Cell n = c + d;
          if (!site.in_bounds(n) || !site.is_wall(n) || label[site.index(n)] >= 0) continue;
          label[site.index(n)] = next_label;
          stack.push_back(n);
        }
      }
      touches_boundary.push_back(boundary);
      ++next_label;
    }
  }

  // Union rooms through the wall components their rings belong to.
  std::vector<int> parent(static_cast<std::size_t>(next_label));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  std::vector<std::set<int>> room_components(site.rooms().size());
  for (std::size_t r = 0; r < site.rooms().size(); ++r) {
    for (Cell c : site.rooms()[r].interior) {
      for (Cell d : kRing) {
        const Cell n = c + d;
        if (site.in_bounds(n) && site.is_wall(n)) room_components[r].insert(label[site.index(n)]);
      }
    }
    if (room_components[r].empty()) continue;
    const int first = *room_components[r].begin();
    for (int comp : room_components[r]) {
      const int a = find(first);
      const int b = find(comp);
      if (a == b) continue;
      const bool bd = touches_boundary[static_cast<std::size_t>(a)] || touches_boundary[static_cast<std::size_t>(b)];
      parent[static_cast<std::size_t>(b)] = a;
      touches_boundary[static_cast<std::size_t>(a)] = bd;
    }
  }

  std::map<int, std::vector<int>> groups;
  for (std::size_t r = 0; r < site.rooms().size(); ++r) {
    if (room_components[r].empty()) continue;
    const int root = find(*room_components[r].begin());
    if (touches_boundary[static_cast<std::size_t>(root)]) continue;
    groups[root].push_back(site.rooms()[r].id);
  }
  std::vector<std::vector<int>> result;
  for (auto& [root, ids] : groups) {
    std::sort(ids.begin(), ids.end());
    result.push_back(std::move(ids));
  }
  std::sort(result.begin(), result.end());
  return result;
}

// --- validation --------------------------------------------------------------

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::NoEntrance: return "NoEntrance";
    case ViolationKind::MultipleEntrances: return "MultipleEntrances";
    case ViolationKind::EntranceWidth: return "EntranceWidth";
    case ViolationKind::EntranceMismatch: return "EntranceMismatch";
    case ViolationKind::UnreachableCell: return "UnreachableCell";
    case ViolationKind::DuplicateRoomId: return "DuplicateRoomId";
    case ViolationKind::EmptyRoom: return "EmptyRoom";
    case ViolationKind::RoomInteriorNotFree: return "RoomInteriorNotFree";
    case ViolationKind::RoomOverlap: return "RoomOverlap";
    case ViolationKind::RoomDisconnected: return "RoomDisconnected";
    case ViolationKind::BadDoor: return "BadDoor";
    case ViolationKind::BadParent: return "BadParent";
    case ViolationKind::NestingViolation: return "NestingViolation";
    case ViolationKind::VictimNotFree: return "VictimNotFree";
  }
  return "Unknown";
}

namespace {

// Boundary cells in clockwise-agnostic cyclic order.
std::vector<Cell> boundary_cycle(int w, int h) {
  std::vector<Cell> cycle;
  if (w == 1 || h == 1) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) cycle.push_back({x, y});
    return cycle;
  }
  for (int x = 0; x < w; ++x) cycle.push_back({x, 0});
  for (int y = 1; y < h; ++y) cycle.push_back({w - 1, y});
  for (int x = w - 2; x >= 0; --x) cycle.push_back({x, h - 1});
  for (int y = h - 2; y >= 1; --y) cycle.push_back({0, y});
  return cycle;
}

void check_entrance(const GridSite& site, std::vector<Violation>& out) {
  const std::vector<Cell> cycle = boundary_cycle(site.width(), site.height());
  const std::size_t n = cycle.size();
  std::vector<std::vector<Cell>> runs;
  // Start the scan just after a wall so runs are not split at the seam.
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (site.is_wall(cycle[i])) {
      start = i;
      break;
    }
  }
  if (start == n) {
    out.push_back({ViolationKind::MultipleEntrances, std::nullopt, std::nullopt, "boundary has no walls"});
    return;
  }
  bool in_run = false;
  for (std::size_t k = 1; k <= n; ++k) {
    const Cell c = cycle[(start + k) % n];
    if (site.is_free(c)) {
      if (!in_run) runs.emplace_back();
      runs.back().push_back(c);
      in_run = true;
    } else {
      in_run = false;
    }
  }
  if (runs.empty()) {
    out.push_back({ViolationKind::NoEntrance, std::nullopt, std::nullopt, "boundary is fully closed"});
  } else if (runs.size() > 1) {
    out.push_back({ViolationKind::MultipleEntrances, runs[1].front(), std::nullopt,
                   std::to_string(runs.size()) + " boundary openings"});
  } else if (runs.front().size() > 3) {
    out.push_back({ViolationKind::EntranceWidth, runs.front().front(), std::nullopt,
                   "entrance is " + std::to_string(runs.front().size()) + " cells wide"});
  }
  std::vector<Cell> open;
  for (const auto& run : runs) open.insert(open.end(), run.begin(), run.end());
  std::vector<Cell> declared = site.entrance();
  std::sort(open.begin(), open.end());
  std::sort(declared.begin(), declared.end());
  if (open != declared) {
    out.push_back({ViolationKind::EntranceMismatch, std::nullopt, std::nullopt,
                   "declared entrance differs from boundary openings"});
  }
}

void check_reachability(const GridSite& site, std::vector<Violation>& out) {
  if (site.entrance().empty()) return;  // reported as NoEntrance already
  std::vector<char> seen(site.cells().size(), 0);
  std::deque<Cell> queue;
  for (Cell c : site.entrance()) {
    if (site.in_bounds(c) && site.is_free(c) && !seen[site.index(c)]) {
      seen[site.index(c)] = 1;
      queue.push_back(c);
    }
  }
  auto flood = [&]() {
    while (!queue.empty()) {
      const Cell c = queue.front();
      queue.pop_front();
      for (Cell d : kOrth) {
        const Cell n = c + d;
        if (!site.in_bounds(n) || site.is_wall(n) || seen[site.index(n)]) continue;
        seen[site.index(n)] = 1;
        queue.push_back(n);
      }
    }
  };
  flood();
  // One violation per unreachable pocket.
  for (int y = 0; y < site.height(); ++y) {
    for (int x = 0; x < site.width(); ++x) {
      const Cell c{x, y};
      if (site.is_wall(c) || seen[site.index(c)]) continue;
      out.push_back({ViolationKind::UnreachableCell, c, std::nullopt, "free cell not reachable from the entrance"});
      seen[site.index(c)] = 1;
      queue.push_back(c);
      flood();
    }
  }
}

bool four_connected(const std::vector<Cell>& cells) {
  if (cells.empty()) return true;
  std::set<Cell> remaining(cells.begin(), cells.end());
  std::vector<Cell> stack{*remaining.begin()};
  remaining.erase(remaining.begin());
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    for (Cell d : kOrth) {
      auto it = remaining.find(c + d);
      if (it == remaining.end()) continue;
      stack.push_back(*it);
      remaining.erase(it);
    }
  }
  return remaining.empty();
}

void check_rooms(const GridSite& site, std::vector<Violation>& out) {
  const auto& rooms = site.rooms();
  std::map<int, std::size_t> by_id;
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    if (!by_id.emplace(rooms[i].id, i).second) {
      out.push_back({ViolationKind::DuplicateRoomId, std::nullopt, rooms[i].id, "room id used twice"});
    }
  }

  std::map<Cell, int> claimed;
  for (const Room& room : rooms) {
    if (room.interior.empty()) {
      out.push_back({ViolationKind::EmptyRoom, std::nullopt, room.id, "room has no interior"});
      continue;
    }
    bool all_free = true;
    for (Cell c : room.interior) {
      if (!site.in_bounds(c) || site.is_wall(c)) {
        out.push_back({ViolationKind::RoomInteriorNotFree, c, room.id, "interior cell is not free"});
        all_free = false;
        continue;
      }
      auto [it, fresh] = claimed.emplace(c, room.id);
      if (!fresh && it->second != room.id) {
        out.push_back({ViolationKind::RoomOverlap, c, room.id,
                       "interior shared with room " + std::to_string(it->second)});
      }
    }
    if (all_free && !four_connected(room.interior)) {
      out.push_back({ViolationKind::RoomDisconnected, room.interior.front(), room.id, "interior is not 4-connected"});
    }
  }

  for (const Room& room : rooms) {
    const std::set<Cell> inside(room.interior.begin(), room.interior.end());
    const std::set<Cell> doors(room.doors.begin(), room.doors.end());
    for (Cell door : room.doors) {
      bool ok = site.in_bounds(door) && site.is_free(door) && !inside.contains(door);
      bool touches_inside = false;
      bool touches_outside = false;
      for (Cell d : kOrth) {
        const Cell n = door + d;
        if (inside.contains(n)) {
          touches_inside = true;
        } else if (site.is_free(n) && !doors.contains(n)) {
          touches_outside = true;
        }
      }
      if (!ok || !touches_inside || !touches_outside) {
        out.push_back({ViolationKind::BadDoor, door, room.id, "door must be free and join interior to exterior"});
      }
    }
  }

  for (const Room& room : rooms) {
    if (!room.parent) continue;
    auto it = by_id.find(*room.parent);
    if (it == by_id.end() || *room.parent == room.id) {
      out.push_back({ViolationKind::BadParent, std::nullopt, room.id, "parent room does not exist"});
      continue;
    }
    // Walk the chain to catch cycles.
    std::set<int> seen{room.id};
    std::optional<int> p = room.parent;
    bool cyclic = false;
    while (p) {
      if (!seen.insert(*p).second) {
        cyclic = true;
        break;
      }
      auto pit = by_id.find(*p);
      if (pit == by_id.end()) break;
      p = rooms[pit->second].parent;
    }
    if (cyclic) {
      out.push_back({ViolationKind::BadParent, std::nullopt, room.id, "cyclic nesting"});
      continue;
    }
    const Room& outer = rooms[it->second];
    if (outer.interior.empty()) continue;
    int x0 = outer.interior.front().x, x1 = x0, y0 = outer.interior.front().y, y1 = y0;
    for (Cell c : outer.interior) {
      x0 = std::min(x0, c.x);
      x1 = std::max(x1, c.x);
      y0 = std::min(y0, c.y);
      y1 = std::max(y1, c.y);
    }
    for (Cell c : room.interior) {
      if (c.x < x0 || c.x > x1 || c.y < y0 || c.y > y1) {
        out.push_back({ViolationKind::NestingViolation, c, room.id, "nested interior escapes its parent"});
        break;
      }
    }
  }
}

}  // namespace

std::vector<Violation> validate_site(const GridSite& site) {
  std::vector<Violation> out;
  check_entrance(site, out);
  check_reachability(site, out);
  check_rooms(site, out);
  for (std::size_t i = 0; i < site.victims().size(); ++i) {
    const Cell c = site.victims()[i].position;
    if (!site.in_bounds(c) || site.is_wall(c)) {
      out.push_back({ViolationKind::VictimNotFree, c, std::nullopt, "victim " + std::to_string(i) + " not on a free cell"});
    }
  }
  return out;
}

std::optional<int> room_of(const GridSite& site, Cell cell) {
  if (site.at(cell) == CellKind::Wall) throw DomainError("cell " + cell_text(cell) + " is a wall");
  const int index = site.room_index(cell);
  if (index < 0) return std::nullopt;
  return site.rooms()[static_cast<std::size_t>(index)].id;
}

}  // namespace swarm
