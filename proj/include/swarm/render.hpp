#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swarm/engine.hpp"
#include "swarm/world.hpp"

namespace swarm {

/// Every color the renderer may emit.
struct Palette {
  static constexpr std::string_view background = "#ffffff";
  static constexpr std::string_view wall = "#3a3a3a";
  static constexpr std::string_view room = "#eeeeee";
  static constexpr std::string_view label = "#555555";
  static constexpr std::string_view entrance = "#2e8b57";
  static constexpr std::string_view victim = "#d62728";
  // Robot paths, cycled when a drawing has more paths than entries.
  static constexpr std::array<std::string_view, 10> robots{
      "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
      "#17becf", "#bcbd22", "#7f7f7f", "#393b79", "#637939"};
};

inline constexpr int kSvgCellPixels = 10;

/// One polyline per robot: the start cell and every cell it moved into, in order.
struct RobotPath {
  int robot = 0;
  std::vector<Cell> cells;
};

/// Paths ordered by robot id. Throws ValidationError when a pose lies outside
/// the site or on a wall.
std::vector<RobotPath> paths_from_trace(const GridSite& site, const std::vector<TraceEvent>& trace);

/// Site drawing with y pointing up. Each trace adds its robots' paths, and a
/// room takes the tint of the robot that entered it first. Empty traces draw
/// nothing, so the output equals the site-only drawing.
std::string render_svg(const GridSite& site, std::span<const std::vector<TraceEvent>> traces = {});

}  // namespace swarm
