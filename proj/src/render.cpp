#include "swarm/render.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>

#include "swarm/errors.hpp"

namespace swarm {

namespace {

constexpr int kPx = kSvgCellPixels;

void check_cell(const GridSite& site, Cell c) {
  if (!site.in_bounds(c)) {
    throw ValidationError("trace cell (" + std::to_string(c.x) + "," + std::to_string(c.y) + ") is outside the " +
                          std::to_string(site.width()) + "x" + std::to_string(site.height()) + " site");
  }
  if (site.is_wall(c)) {
    throw ValidationError("trace cell (" + std::to_string(c.x) + "," + std::to_string(c.y) + ") is a wall");
  }
}

struct Drawing {
  const GridSite& site;
  std::string out;

  int px_x(int x) const { return x * kPx; }
  int px_y(int y) const { return (site.height() - 1 - y) * kPx; }

  void rect(int x, int y, int w, std::string_view fill, std::string_view extra = {}) {
    out += "<rect x=\"" + std::to_string(px_x(x)) + "\" y=\"" + std::to_string(px_y(y)) + "\" width=\"" +
           std::to_string(w * kPx) + "\" height=\"" + std::to_string(kPx) + "\" fill=\"" + std::string(fill) + "\"";
    if (!extra.empty()) out += " " + std::string(extra);
    out += "/>\n";
  }

  // Horizontal runs of the selected cells, one rect per run.
  template <typename Pred>
  void runs(Pred selected, std::string_view fill, std::string_view extra = {}) {
    for (int y = site.height() - 1; y >= 0; --y) {
      int x = 0;
      while (x < site.width()) {
        if (!selected(Cell{x, y})) {
          ++x;
          continue;
        }
        int end = x;
        while (end < site.width() && selected(Cell{end, y})) ++end;
        rect(x, y, end - x, fill, extra);
        x = end;
      }
    }
  }
};

// Interior cell nearest the interior's mean position, for the room label.
Cell label_cell(const Room& room) {
  double mx = 0.0;
  double my = 0.0;
  for (Cell c : room.interior) {
    mx += c.x;
    my += c.y;
  }
  mx /= static_cast<double>(room.interior.size());
  my /= static_cast<double>(room.interior.size());
  Cell best = room.interior.front();
  double best_d = 1e300;
  for (Cell c : room.interior) {
    const double d = (c.x - mx) * (c.x - mx) + (c.y - my) * (c.y - my);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

std::vector<RobotPath> paths_from_trace(const GridSite& site, const std::vector<TraceEvent>& trace) {
  std::map<int, RobotPath> paths;
  for (const TraceEvent& e : trace) {
    check_cell(site, e.before.cell);
    check_cell(site, e.after.cell);
    auto [it, inserted] = paths.try_emplace(e.robot);
    RobotPath& p = it->second;
    if (inserted) {
      p.robot = e.robot;
      p.cells.push_back(e.before.cell);
    }
    if (p.cells.back() != e.after.cell) p.cells.push_back(e.after.cell);
  }
  std::vector<RobotPath> out;
  for (auto& [id, p] : paths) out.push_back(std::move(p));
  return out;
}

std::string render_svg(const GridSite& site, std::span<const std::vector<TraceEvent>> traces) {
  // Paths and first visits over all traces, in (tick, trace, robot) order.
  std::vector<RobotPath> paths;
  struct Visit {
    int tick;
    std::size_t trace;
    int robot;
    Cell cell;
    std::size_t path;
  };
  std::vector<Visit> visits;
  for (std::size_t t = 0; t < traces.size(); ++t) {
    std::vector<RobotPath> ps = paths_from_trace(site, traces[t]);
    std::map<int, std::size_t> slot;
    for (RobotPath& p : ps) {
      slot[p.robot] = paths.size();
      paths.push_back(std::move(p));
    }
    std::map<int, bool> started;
    for (const TraceEvent& e : traces[t]) {
      const std::size_t path = slot.at(e.robot);
      if (!started[e.robot]) {
        started[e.robot] = true;
        visits.push_back({0, t, e.robot, e.before.cell, path});
      }
      visits.push_back({e.tick, t, e.robot, e.after.cell, path});
    }
  }
  std::stable_sort(visits.begin(), visits.end(), [](const Visit& a, const Visit& b) {
    return std::tie(a.tick, a.trace, a.robot) < std::tie(b.tick, b.trace, b.robot);
  });
  std::vector<std::optional<std::size_t>> tint(site.rooms().size());
  for (const Visit& v : visits) {
    int room = site.room_index(v.cell);
    while (room >= 0) {
      auto& slot = tint[static_cast<std::size_t>(room)];
      if (!slot) slot = v.path;
      const auto& parent = site.rooms()[static_cast<std::size_t>(room)].parent;
      room = parent ? site.index_of_room(*parent) : -1;
    }
  }
  auto path_color = [](std::size_t path) { return Palette::robots[path % Palette::robots.size()]; };

  Drawing d{site, {}};
  const int w = site.width() * kPx;
  const int h = site.height() * kPx;
  d.out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  d.out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
           std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) + "\">\n";
  d.out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(w) + "\" height=\"" + std::to_string(h) +
           "\" fill=\"" + std::string(Palette::background) + "\"/>\n";

  // Nested rooms are drawn after their parents, so the innermost tint wins.
  std::vector<std::pair<int, std::size_t>> order;
  for (std::size_t r = 0; r < site.rooms().size(); ++r) {
    int depth = 0;
    for (auto parent = site.rooms()[r].parent; parent && depth <= static_cast<int>(site.rooms().size());) {
      ++depth;
      const int idx = site.index_of_room(*parent);
      parent = idx >= 0 ? site.rooms()[static_cast<std::size_t>(idx)].parent : std::nullopt;
    }
    order.push_back({depth, r});
  }
  std::sort(order.begin(), order.end());
  d.out += "<g id=\"rooms\">\n";
  for (const auto& [depth, r] : order) {
    std::vector<Cell> sorted = site.rooms()[r].interior;
    std::sort(sorted.begin(), sorted.end());
    auto in_sorted = [&](Cell c) { return std::binary_search(sorted.begin(), sorted.end(), c); };
    if (tint[r]) {
      d.runs(in_sorted, path_color(*tint[r]), "fill-opacity=\"0.3\"");
    } else {
      d.runs(in_sorted, Palette::room);
    }
  }
  d.out += "</g>\n";

  d.out += "<g id=\"walls\">\n";
  d.runs([&](Cell c) { return site.is_wall(c); }, Palette::wall);
  d.out += "</g>\n";

  d.out += "<g id=\"entrance\">\n";
  for (Cell c : site.entrance()) d.rect(c.x, c.y, 1, Palette::entrance);
  d.out += "</g>\n";

  d.out += "<g id=\"labels\" font-family=\"sans-serif\" font-size=\"" + std::to_string(kPx) +
           "\" text-anchor=\"middle\" fill=\"" + std::string(Palette::label) + "\">\n";
  for (const Room& room : site.rooms()) {
    if (room.interior.empty()) continue;
    const Cell c = label_cell(room);
    d.out += "<text x=\"" + std::to_string(d.px_x(c.x) + kPx / 2) + "\" y=\"" +
             std::to_string(d.px_y(c.y) + kPx - 1) + "\">" + std::to_string(room.id) + "</text>\n";
  }
  d.out += "</g>\n";

  d.out += "<g id=\"victims\">\n";
  for (const Victim& v : site.victims()) {
    d.out += "<circle cx=\"" + std::to_string(d.px_x(v.position.x) + kPx / 2) + "\" cy=\"" +
             std::to_string(d.px_y(v.position.y) + kPx / 2) + "\" r=\"" + std::to_string(kPx / 2 - 1) +
             "\" fill=\"" + std::string(Palette::victim) + "\"/>\n";
  }
  d.out += "</g>\n";

  if (!paths.empty()) {
    d.out += "<g id=\"paths\" fill=\"none\" stroke-width=\"2\" stroke-linejoin=\"round\">\n";
    for (std::size_t p = 0; p < paths.size(); ++p) {
      d.out += "<polyline data-robot=\"" + std::to_string(paths[p].robot) + "\" stroke=\"" +
               std::string(path_color(p)) + "\" points=\"";
      bool first = true;
      for (Cell c : paths[p].cells) {
        if (!first) d.out += ' ';
        first = false;
        d.out += std::to_string(d.px_x(c.x) + kPx / 2) + "," + std::to_string(d.px_y(c.y) + kPx / 2);
      }
      d.out += "\"/>\n";
    }
    d.out += "</g>\n";
  }
  d.out += "</svg>\n";
  return d.out;
}

}  // namespace swarm
