#include "swarm/sitegen.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <deque>
#include <utility>

#include "swarm/errors.hpp"
#include "swarm/rng.hpp"

namespace swarm {

SiteConfig big_config() {
  SiteConfig c{"big", {}, 4000};
  c.params.width_cells = 120;
  c.params.height_cells = 60;
  c.params.n_rooms = 120;
  return c;
}

SiteConfig medium_config() {
  SiteConfig c{"medium", {}, 2000};
  c.params.width_cells = 80;
  c.params.height_cells = 40;
  c.params.n_rooms = 60;
  return c;
}

SiteConfig small_config() {
  SiteConfig c{"small", {}, 1000};
  c.params.width_cells = 60;
  c.params.height_cells = 30;
  c.params.n_rooms = 30;
  return c;
}

std::optional<SiteConfig> site_config_by_name(const std::string& name) {
  std::string lower;
  for (char ch : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "big") return big_config();
  if (lower == "medium") return medium_config();
  if (lower == "small") return small_config();
  return std::nullopt;
}

namespace {

constexpr int kMinRoomSide = 3;        // smallest room interior extent, cells
constexpr int kMinBlockSpan = kMinRoomSide + 1;
constexpr int kMinNestLeg = 2;         // free strip a nesting parent keeps around its child
constexpr int kAttemptBudget = 24;
constexpr double kExtraDoorProbability = 0.1;
constexpr double kWideDoorProbability = 0.5;

constexpr std::array<Cell, 4> kOrth{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

// Rectangle of wall lines, inclusive; the interior is strictly inside.
struct Rect {
  int x0, y0, x1, y1;
  int inner_w() const { return x1 - x0 - 1; }
  int inner_h() const { return y1 - y0 - 1; }
  long inner_area() const { return static_cast<long>(inner_w()) * inner_h(); }
};

struct RoomRect {
  Rect rect;
  int parent = -1;
  bool locked = false;
};

struct DoorCandidate {
  Cell cell;
  Cell along;  // unit step along the wall
  int a;       // component on one side
  int b;       // component on the other
};

class Builder {
 public:
  Builder(const SiteGenParams& p, std::uint64_t attempt_seed)
      : p_(p), rng_(attempt_seed), w_(p.width_cells), h_(p.height_cells),
        grid_(static_cast<std::size_t>(w_ * h_), CellKind::Free) {}

  std::optional<GridSite> build() {
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) {
        if (x == 0 || y == 0 || x == w_ - 1 || y == h_ - 1) set({x, y}, CellKind::Wall);
      }
    }
    if (p_.n_rooms == 0) {
      open_entrance_bottom((w_ - p_.entrance_width) / 2);
      return finish({}, {});
    }
    if (!partition_corridors()) return std::nullopt;
    choose_blocks();
    detach_islands();
    if (!subdivide_rooms()) return std::nullopt;
    for (const RoomRect& room : rooms_) draw_rect(room.rect);
    for (Cell c : entrance_) set(c, CellKind::Free);
    std::vector<int> owner = fill_owners();
    std::vector<std::pair<Cell, std::pair<int, int>>> doors;
    if (!carve_doors(owner, doors)) return std::nullopt;
    return finish(owner, doors);
  }

 private:
  void set(Cell c, CellKind k) { grid_[idx(c)] = k; }
  bool wall(Cell c) const { return c.x < 0 || c.y < 0 || c.x >= w_ || c.y >= h_ || grid_[idx(c)] == CellKind::Wall; }
  std::size_t idx(Cell c) const { return static_cast<std::size_t>(c.y * w_ + c.x); }
  bool boundary(Cell c) const { return c.x == 0 || c.y == 0 || c.x == w_ - 1 || c.y == h_ - 1; }

  void open_entrance_bottom(int x_start) {
    for (int k = 0; k < p_.entrance_width; ++k) entrance_.push_back({x_start + k, 0});
    for (Cell c : entrance_) set(c, CellKind::Free);
  }

  int corridor_width() { return rng_.range(p_.corridor_min_width, p_.corridor_min_width + 1); }

  bool has_boundary_side(const Rect& r) const {
    return r.x0 == 0 || r.y0 == 0 || r.x1 == w_ - 1 || r.y1 == h_ - 1;
  }

  // Splits across x (a vertical corridor) or y. Returns the two child regions.
  static std::pair<Rect, Rect> split(const Rect& r, bool vertical, int s, int cw) {
    if (vertical) return {{r.x0, r.y0, s, r.y1}, {s + cw + 1, r.y0, r.x1, r.y1}};
    return {{r.x0, r.y0, r.x1, s}, {r.x0, s + cw + 1, r.x1, r.y1}};
  }

  bool split_allowed(const Rect& r, bool vertical, int cw) const {
    const int span = vertical ? r.x1 - r.x0 : r.y1 - r.y0;
    if (span < 2 * kMinBlockSpan + cw + 1) return false;
    // The new corridor must reach an existing corridor at one end.
    const bool connects = vertical ? (r.y0 != 0 || r.y1 != h_ - 1) : (r.x0 != 0 || r.x1 != w_ - 1);
    if (!connects) return false;
    // Both children must stay attached to the outer walls; islands are only
    // introduced deliberately.
    const auto [a, b] = split(r, vertical, vertical ? r.x0 + kMinBlockSpan : r.y0 + kMinBlockSpan, cw);
    return has_boundary_side(a) && has_boundary_side(b);
  }

  int pick_split(const Rect& r, bool vertical, int cw) {
    const int lo_line = vertical ? r.x0 : r.y0;
    const int hi_line = vertical ? r.x1 : r.y1;
    const int lo = lo_line + kMinBlockSpan;
    const int hi = hi_line - cw - 1 - kMinBlockSpan;
    const int span = hi_line - lo_line;
    const int inner_lo = std::max(lo, lo_line + span * 3 / 10);
    const int inner_hi = std::min(hi, hi_line - cw - span * 3 / 10);
    if (inner_lo <= inner_hi) return rng_.range(inner_lo, inner_hi);
    return rng_.range(lo, hi);
  }

  bool partition_corridors() {
    const Rect site{0, 0, w_ - 1, h_ - 1};
    const bool vertical = w_ >= h_;
    const int ew = p_.entrance_width;
    const int cw = std::max(corridor_width(), ew);
    const int span = vertical ? w_ - 1 : h_ - 1;
    const int lo = kMinBlockSpan;
    const int hi = span - cw - 1 - kMinBlockSpan;
    if (lo > hi) return false;
    const int mid = (span - cw) / 2;
    const int jitter = std::max(1, span / 8);
    const int s = rng_.range(std::max(lo, mid - jitter), std::min(hi, mid + jitter));

    // Entrance at one end of the root corridor.
    const int offset = rng_.range(0, cw - ew);
    const bool far_end = rng_.bernoulli(0.5);
    for (int k = 0; k < ew; ++k) {
      const int along = s + 1 + offset + k;
      entrance_.push_back(vertical ? Cell{along, far_end ? h_ - 1 : 0} : Cell{far_end ? w_ - 1 : 0, along});
    }
    std::sort(entrance_.begin(), entrance_.end());

    const double room_area = static_cast<double>(w_) * h_ / std::max(1, p_.n_rooms);
    std::deque<Rect> queue;
    auto [a, b] = split(site, vertical, s, cw);
    queue.push_back(a);
    queue.push_back(b);
    while (!queue.empty()) {
      const Rect r = queue.front();
      queue.pop_front();
      const double threshold = room_area * (3.0 + 4.0 * rng_.uniform());
      const int width_cw = corridor_width();
      if (static_cast<double>(r.inner_area()) > threshold) {
        const bool can_v = split_allowed(r, true, width_cw);
        const bool can_h = split_allowed(r, false, width_cw);
        if (can_v || can_h) {
          bool v = can_v;
          if (can_v && can_h) {
            const bool prefer_v = (r.x1 - r.x0) >= (r.y1 - r.y0);
            v = rng_.bernoulli(0.8) ? prefer_v : !prefer_v;
          }
          const int cut = pick_split(r, v, width_cw);
          auto [c1, c2] = split(r, v, cut, width_cw);
          queue.push_back(c1);
          queue.push_back(c2);
          continue;
        }
      }
      blocks_.push_back(r);
    }
    return true;
  }

  void choose_blocks() {
    if (static_cast<int>(blocks_.size()) <= p_.n_rooms) return;
    // Keep the largest blocks; the rest stay open floor.
    std::vector<std::size_t> order(blocks_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng_.below(i)]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return blocks_[x].inner_area() > blocks_[y].inner_area(); });
    order.resize(static_cast<std::size_t>(p_.n_rooms));
    std::sort(order.begin(), order.end());
    std::vector<Rect> kept;
    for (std::size_t i : order) kept.push_back(blocks_[i]);
    blocks_ = std::move(kept);
  }

  // With the island probability, one block is pulled away from the outer walls.
  void detach_islands() {
    if (!rng_.bernoulli(p_.island_probability)) return;
    const int gap = corridor_width();
    std::vector<std::size_t> eligible;
    std::vector<Rect> shrunk_blocks;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      Rect shrunk = blocks_[i];
      if (shrunk.x0 == 0) shrunk.x0 = gap + 1;
      if (shrunk.y0 == 0) shrunk.y0 = gap + 1;
      if (shrunk.x1 == w_ - 1) shrunk.x1 = w_ - 2 - gap;
      if (shrunk.y1 == h_ - 1) shrunk.y1 = h_ - 2 - gap;
      if (shrunk.inner_w() >= kMinRoomSide && shrunk.inner_h() >= kMinRoomSide) {
        eligible.push_back(i);
        shrunk_blocks.push_back(shrunk);
      }
    }
    if (eligible.empty()) return;
    const std::size_t pick = rng_.below(eligible.size());
    blocks_[eligible[pick]] = shrunk_blocks[pick];
  }

  bool subdivide_rooms() {
    for (const Rect& r : blocks_) rooms_.push_back({r, -1, false});
    const int m = kMinRoomSide;
    while (static_cast<int>(rooms_.size()) < p_.n_rooms) {
      std::vector<double> weight(rooms_.size(), 0.0);
      double total = 0.0;
      for (std::size_t i = 0; i < rooms_.size(); ++i) {
        const Rect& r = rooms_[i].rect;
        if (rooms_[i].locked) continue;
        const bool splittable = r.inner_w() >= 2 * m + 1 || r.inner_h() >= 2 * m + 1;
        const bool nestable = r.inner_w() >= m + 1 + kMinNestLeg && r.inner_h() >= m + 1 + kMinNestLeg;
        if (!splittable && !nestable) continue;
        const double area = static_cast<double>(r.inner_area());
        weight[i] = area * area;
        total += weight[i];
      }
      if (total <= 0.0) return false;
      double pick = rng_.uniform() * total;
      std::size_t chosen = 0;
      for (std::size_t i = 0; i < weight.size(); ++i) {
        if (weight[i] <= 0.0) continue;
        chosen = i;
        if (pick < weight[i]) break;
        pick -= weight[i];
      }

      const Rect r = rooms_[chosen].rect;
      const bool can_v = r.inner_w() >= 2 * m + 1;
      const bool can_h = r.inner_h() >= 2 * m + 1;
      const bool nestable = r.inner_w() >= m + 1 + kMinNestLeg && r.inner_h() >= m + 1 + kMinNestLeg;
      const bool nest = nestable && (rng_.bernoulli(p_.nesting_probability) || (!can_v && !can_h));
      if (nest) {
        const int cw = rng_.range(m, r.inner_w() - 1 - kMinNestLeg);
        const int ch = rng_.range(m, r.inner_h() - 1 - kMinNestLeg);
        const int corner = static_cast<int>(rng_.below(4));
        const int x0 = (corner & 1) ? r.x1 - cw - 1 : r.x0;
        const int y0 = (corner & 2) ? r.y1 - ch - 1 : r.y0;
        rooms_[chosen].locked = true;
        rooms_.push_back({{x0, y0, x0 + cw + 1, y0 + ch + 1}, static_cast<int>(chosen), true});
        continue;
      }
      bool vertical = can_v;
      if (can_v && can_h) {
        vertical = r.inner_w() == r.inner_h() ? rng_.bernoulli(0.5) : r.inner_w() > r.inner_h();
      }
      if (vertical) {
        const int s = rng_.range(r.x0 + m + 1, r.x1 - m - 1);
        rooms_[chosen].rect = {r.x0, r.y0, s, r.y1};
        rooms_.push_back({{s, r.y0, r.x1, r.y1}, -1, false});
      } else {
        const int s = rng_.range(r.y0 + m + 1, r.y1 - m - 1);
        rooms_[chosen].rect = {r.x0, r.y0, r.x1, s};
        rooms_.push_back({{r.x0, s, r.x1, r.y1}, -1, false});
      }
    }
    return true;
  }

  void draw_rect(const Rect& r) {
    for (int x = r.x0; x <= r.x1; ++x) {
      set({x, r.y0}, CellKind::Wall);
      set({x, r.y1}, CellKind::Wall);
    }
    for (int y = r.y0; y <= r.y1; ++y) {
      set({r.x0, y}, CellKind::Wall);
      set({r.x1, y}, CellKind::Wall);
    }
  }

  std::vector<int> fill_owners() const {
    std::vector<int> owner(grid_.size(), -1);
    // Outer rooms first so nested rooms overwrite their footprint.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < rooms_.size(); ++i) {
        if ((rooms_[i].parent >= 0) != (pass == 1)) continue;
        const Rect& r = rooms_[i].rect;
        for (int y = r.y0 + 1; y < r.y1; ++y) {
          for (int x = r.x0 + 1; x < r.x1; ++x) {
            if (!wall({x, y})) owner[idx({x, y})] = static_cast<int>(i);
          }
        }
      }
    }
    return owner;
  }

  // Joins every free-space component to the entrance with a random spanning
  // tree of doors, then sprinkles a few extra doors.
  bool carve_doors(const std::vector<int>& owner, std::vector<std::pair<Cell, std::pair<int, int>>>& doors) {
    std::vector<int> comp(grid_.size(), -1);
    int n_comp = 0;
    std::vector<Cell> stack;
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) {
        if (wall({x, y}) || comp[idx({x, y})] >= 0) continue;
        comp[idx({x, y})] = n_comp;
        stack.assign(1, Cell{x, y});
        while (!stack.empty()) {
          const Cell c = stack.back();
          stack.pop_back();
          for (Cell d : kOrth) {
            const Cell n = c + d;
            if (wall(n) || comp[idx(n)] >= 0) continue;
            comp[idx(n)] = n_comp;
            stack.push_back(n);
          }
        }
        ++n_comp;
      }
    }

    std::vector<DoorCandidate> candidates;
    for (int y = 1; y < h_ - 1; ++y) {
      for (int x = 1; x < w_ - 1; ++x) {
        const Cell c{x, y};
        if (!wall(c)) continue;
        for (int axis = 0; axis < 2; ++axis) {
          const Cell across = axis == 0 ? Cell{1, 0} : Cell{0, 1};
          const Cell along = axis == 0 ? Cell{0, 1} : Cell{1, 0};
          const Cell s1 = c + across;
          const Cell s2 = c - across;
          if (wall(s1) || wall(s2) || !wall(c + along) || !wall(c - along)) continue;
          const int a = comp[idx(s1)];
          const int b = comp[idx(s2)];
          if (a != b) candidates.push_back({c, along, a, b});
        }
      }
    }

    const int root = comp[idx(entrance_.front())];
    std::vector<char> joined(static_cast<std::size_t>(n_comp), 0);
    joined[static_cast<std::size_t>(root)] = 1;
    int remaining = n_comp - 1;

    auto still_valid = [&](const DoorCandidate& d) {
      return wall(d.cell) && wall(d.cell + d.along) && wall(d.cell - d.along);
    };
    auto carve = [&](const DoorCandidate& d) {
      const Cell across = d.along.x == 0 ? Cell{1, 0} : Cell{0, 1};
      const int oa = owner[idx(d.cell + across)];
      const int ob = owner[idx(d.cell - across)];
      set(d.cell, CellKind::Free);
      doors.push_back({d.cell, {oa, ob}});
      if (!rng_.bernoulli(kWideDoorProbability)) return;
      for (int dir : {1, -1}) {
        const Cell next = dir > 0 ? d.cell + d.along : d.cell - d.along;
        const Cell beyond = dir > 0 ? next + d.along : next - d.along;
        if (next.x <= 0 || next.y <= 0 || next.x >= w_ - 1 || next.y >= h_ - 1) continue;
        if (wall(next + across) || wall(next - across) || !wall(beyond)) continue;
        if (comp[idx(next + across)] != comp[idx(d.cell + across)] ||
            comp[idx(next - across)] != comp[idx(d.cell - across)]) {
          continue;
        }
        set(next, CellKind::Free);
        doors.push_back({next, {owner[idx(next + across)], owner[idx(next - across)]}});
        return;
      }
    };

    std::vector<std::size_t> frontier;
    while (remaining > 0) {
      frontier.clear();
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& d = candidates[i];
        if (joined[static_cast<std::size_t>(d.a)] != joined[static_cast<std::size_t>(d.b)] && still_valid(d)) {
          frontier.push_back(i);
        }
      }
      if (frontier.empty()) return false;
      const DoorCandidate& d = candidates[frontier[rng_.below(frontier.size())]];
      carve(d);
      joined[static_cast<std::size_t>(d.a)] = 1;
      joined[static_cast<std::size_t>(d.b)] = 1;
      --remaining;
    }

    for (std::size_t r = 0; r < rooms_.size(); ++r) {
      if (!rng_.bernoulli(kExtraDoorProbability)) continue;
      frontier.clear();
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& d = candidates[i];
        const Cell across = d.along.x == 0 ? Cell{1, 0} : Cell{0, 1};
        const bool touches = owner[idx(d.cell + across)] == static_cast<int>(r) ||
                             owner[idx(d.cell - across)] == static_cast<int>(r);
        if (touches && still_valid(d)) frontier.push_back(i);
      }
      if (!frontier.empty()) carve(candidates[frontier[rng_.below(frontier.size())]]);
    }
    return true;
  }

  std::optional<GridSite> finish(const std::vector<int>& owner,
                                 const std::vector<std::pair<Cell, std::pair<int, int>>>& doors) {
    std::vector<Room> rooms(rooms_.size());
    for (std::size_t i = 0; i < rooms_.size(); ++i) {
      rooms[i].id = static_cast<int>(i);
      if (rooms_[i].parent >= 0) rooms[i].parent = rooms_[i].parent;
    }
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) {
        const int o = owner.empty() ? -1 : owner[idx({x, y})];
        if (o >= 0) rooms[static_cast<std::size_t>(o)].interior.push_back({x, y});
      }
    }
    for (const auto& [cell, sides] : doors) {
      for (int o : {sides.first, sides.second}) {
        if (o >= 0) rooms[static_cast<std::size_t>(o)].doors.push_back(cell);
      }
    }
    for (Room& r : rooms) std::sort(r.doors.begin(), r.doors.end());

    if (!all_reachable()) return std::nullopt;

    std::vector<std::size_t> order(rooms.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng_.below(i)]);
    std::vector<Victim> victims;
    for (int v = 0; v < p_.n_victims; ++v) {
      const Room& r = rooms[order[static_cast<std::size_t>(v)]];
      victims.push_back({r.interior[rng_.below(r.interior.size())]});
    }
    return GridSite(w_, h_, grid_, entrance_, std::move(rooms), std::move(victims), p_.seed);
  }

  bool all_reachable() const {
    std::vector<char> seen(grid_.size(), 0);
    std::vector<Cell> stack(entrance_.begin(), entrance_.end());
    for (Cell c : stack) seen[idx(c)] = 1;
    std::size_t reached = stack.size();
    while (!stack.empty()) {
      const Cell c = stack.back();
      stack.pop_back();
      for (Cell d : kOrth) {
        const Cell n = c + d;
        if (wall(n) || seen[idx(n)]) continue;
        seen[idx(n)] = 1;
        ++reached;
        stack.push_back(n);
      }
    }
    const auto free_cells = static_cast<std::size_t>(std::count(grid_.begin(), grid_.end(), CellKind::Free));
    return reached == free_cells;
  }

  const SiteGenParams& p_;
  Rng rng_;
  int w_;
  int h_;
  std::vector<CellKind> grid_;
  std::vector<Cell> entrance_;
  std::vector<Rect> blocks_;
  std::vector<RoomRect> rooms_;
};

void check_params(const SiteGenParams& p) {
  if (p.width_cells < 3 || p.height_cells < 3) throw DomainError("site must be at least 3x3 cells");
  if (p.n_rooms < 0 || p.n_victims < 0) throw DomainError("room and victim counts must be nonnegative");
  if (p.island_probability < 0.0 || p.island_probability > 1.0) throw DomainError("island_probability outside [0,1]");
  if (p.nesting_probability < 0.0 || p.nesting_probability > 1.0) throw DomainError("nesting_probability outside [0,1]");
  if (p.corridor_min_width < 1) throw DomainError("corridor_min_width must be positive");
  if (p.entrance_width < 1 || p.entrance_width > 3) throw DomainError("entrance_width must be 1-3");
  if (p.entrance_width > std::min(p.width_cells, p.height_cells) - 2) throw DomainError("entrance wider than the site side");
  if (p.n_victims > p.n_rooms) throw InfeasibleParams("more victims than rooms");
}

}  // namespace

GridSite generate(const SiteGenParams& params) {
  check_params(params);
  for (int attempt = 0; attempt < kAttemptBudget; ++attempt) {
    Builder builder(params, derive_seed(params.seed, static_cast<std::uint64_t>(attempt)));
    if (auto site = builder.build()) return std::move(*site);
  }
  throw InfeasibleParams("could not pack " + std::to_string(params.n_rooms) + " rooms into a " +
                         std::to_string(params.width_cells) + "x" + std::to_string(params.height_cells) + " site");
}

std::vector<GridSite> generate_batch(const SiteGenParams& params, std::size_t count, std::uint64_t base_seed) {
  if (count == 0) throw DomainError("batch count must be at least 1");
  std::vector<GridSite> sites;
  sites.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SiteGenParams p = params;
    p.seed = derive_seed(base_seed, i);
    try {
      sites.push_back(generate(p));
    } catch (const InfeasibleParams& e) {
      throw InfeasibleParams(e.what(), i);
    }
  }
  return sites;
}

}  // namespace swarm
