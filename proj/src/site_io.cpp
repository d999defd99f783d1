#include "swarm/site_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "swarm/errors.hpp"

namespace swarm {

using nlohmann::json;
using nlohmann::ordered_json;

std::string encode_cells(std::span<const CellKind> cells) {
  std::string out;
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i;
    while (j < cells.size() && cells[j] == cells[i]) ++j;
    out += std::to_string(j - i);
    out += cells[i] == CellKind::Wall ? 'W' : 'F';
    i = j;
  }
  return out;
}

std::vector<CellKind> decode_cells(std::string_view text, std::size_t expected) {
  std::vector<CellKind> cells;
  cells.reserve(expected);
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t count = 0;
    const std::size_t digits_start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      count = count * 10 + static_cast<std::size_t>(text[pos] - '0');
      ++pos;
      if (count > expected) throw ValidationError("cell run exceeds grid size");
    }
    if (pos == digits_start || pos == text.size() || count == 0) throw ValidationError("malformed cell encoding");
    const char kind = text[pos++];
    if (kind != 'W' && kind != 'F') throw ValidationError("unknown cell kind in encoding");
    cells.insert(cells.end(), count, kind == 'W' ? CellKind::Wall : CellKind::Free);
    if (cells.size() > expected) throw ValidationError("cell encoding longer than grid");
  }
  if (cells.size() != expected) throw ValidationError("cell encoding shorter than grid");
  return cells;
}

namespace {

ordered_json cells_to_json(const std::vector<Cell>& cells) {
  ordered_json arr = ordered_json::array();
  for (Cell c : cells) arr.push_back({c.x, c.y});
  return arr;
}

std::vector<Cell> cells_from_json(const json& arr) {
  if (!arr.is_array()) throw ValidationError("expected an array of [x, y] pairs");
  std::vector<Cell> cells;
  cells.reserve(arr.size());
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) throw ValidationError("expected an [x, y] pair");
    cells.push_back({p[0].get<int>(), p[1].get<int>()});
  }
  return cells;
}

}  // namespace

ordered_json site_to_json(const GridSite& site) {
  ordered_json doc;
  doc["width"] = site.width();
  doc["height"] = site.height();
  doc["seed"] = site.seed();
  doc["cells"] = encode_cells(site.cells());
  doc["entrance"] = cells_to_json(site.entrance());
  ordered_json rooms = ordered_json::array();
  for (const Room& r : site.rooms()) {
    ordered_json room;
    room["id"] = r.id;
    room["interior"] = cells_to_json(r.interior);
    room["doors"] = cells_to_json(r.doors);
    room["parent"] = r.parent ? ordered_json(*r.parent) : ordered_json(nullptr);
    rooms.push_back(std::move(room));
  }
  doc["rooms"] = std::move(rooms);
  ordered_json victims = ordered_json::array();
  for (const Victim& v : site.victims()) victims.push_back({{"x", v.position.x}, {"y", v.position.y}});
  doc["victims"] = std::move(victims);
  return doc;
}

GridSite site_from_json(const json& doc) {
  try {
    const int width = doc.at("width").get<int>();
    const int height = doc.at("height").get<int>();
    if (width <= 0 || height <= 0) throw ValidationError("site dimensions must be positive");
    const auto seed = doc.at("seed").get<std::uint64_t>();
    auto cells = decode_cells(doc.at("cells").get<std::string>(),
                              static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    std::vector<Room> rooms;
    for (const auto& r : doc.at("rooms")) {
      Room room;
      room.id = r.at("id").get<int>();
      room.interior = cells_from_json(r.at("interior"));
      room.doors = cells_from_json(r.at("doors"));
      if (r.contains("parent") && !r.at("parent").is_null()) room.parent = r.at("parent").get<int>();
      rooms.push_back(std::move(room));
    }
    std::vector<Victim> victims;
    for (const auto& v : doc.at("victims")) victims.push_back({{v.at("x").get<int>(), v.at("y").get<int>()}});
    return GridSite(width, height, std::move(cells), cells_from_json(doc.at("entrance")), std::move(rooms),
                    std::move(victims), seed);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad site document: ") + e.what());
  }
}

std::string serialize_site(const GridSite& site) { return site_to_json(site).dump(); }

GridSite parse_site(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ValidationError("site document is not valid JSON");
  return site_from_json(doc);
}

GridSite load_site(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open site file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_site(buffer.str());
}

void save_site(const GridSite& site, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write site file " + path);
  out << serialize_site(site) << '\n';
}

}  // namespace swarm
