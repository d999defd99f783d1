#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarm/world.hpp"

namespace swarm {

struct SiteGenParams {
  int width_cells = 60;
  int height_cells = 30;
  int n_rooms = 30;
  int n_victims = 0;
  double island_probability = 0.2;
  double nesting_probability = 0.2;
  int corridor_min_width = 2;
  int entrance_width = 2;
  std::uint64_t seed = 0;
};

/// Named site presets (Big / Medium / Small) with their per-robot action budgets.
struct SiteConfig {
  std::string name;
  SiteGenParams params;
  int max_actions_per_robot = 1000;
};

SiteConfig big_config();
SiteConfig medium_config();
SiteConfig small_config();
/// "big", "medium" or "small" (case-insensitive); nullopt otherwise.
std::optional<SiteConfig> site_config_by_name(const std::string& name);

/// Random site built by corridor-then-room binary space partitioning.
/// Pure function of the parameters (including the seed). Throws DomainError
/// for malformed parameters and InfeasibleParams when the requested rooms
/// cannot be packed within the attempt budget.
GridSite generate(const SiteGenParams& params);

/// `count` sites; site i is generate() with seed derive_seed(base_seed, i).
std::vector<GridSite> generate_batch(const SiteGenParams& params, std::size_t count, std::uint64_t base_seed);

}  // namespace swarm
