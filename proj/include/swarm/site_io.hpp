#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "swarm/world.hpp"

namespace swarm {

/// Run-length encoding of the cell grid, row-major from y = 0: "<count><W|F>"...
std::string encode_cells(std::span<const CellKind> cells);
std::vector<CellKind> decode_cells(std::string_view text, std::size_t expected);

nlohmann::ordered_json site_to_json(const GridSite& site);
GridSite site_from_json(const nlohmann::json& doc);

std::string serialize_site(const GridSite& site);
GridSite parse_site(std::string_view text);

GridSite load_site(const std::string& path);
void save_site(const GridSite& site, const std::string& path);

}  // namespace swarm
