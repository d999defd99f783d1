#include "swarm/engine.hpp"

#include <algorithm>
#include <cmath>

#include "swarm/errors.hpp"

namespace swarm {

std::string_view to_string(Departure d) { return d == Departure::Center ? "center" : "edge"; }

std::optional<Departure> parse_departure(std::string_view name) {
  if (name == "center") return Departure::Center;
  if (name == "edge") return Departure::Edge;
  return std::nullopt;
}

std::vector<Pose> place_robots(const GridSite& site, int n, Departure departure, double bias) {
  if (n < 1) throw DomainError("swarm size must be at least 1");
  double tx = 0.0;
  double ty = 0.0;
  if (departure == Departure::Center) {
    tx = (site.width() - 1) / 2.0;
    ty = (site.height() - 1) / 2.0;
  } else {
    if (site.entrance().empty()) throw InsufficientSpace("site has no entrance");
    for (Cell c : site.entrance()) {
      tx += c.x;
      ty += c.y;
    }
    tx /= static_cast<double>(site.entrance().size());
    ty /= static_cast<double>(site.entrance().size());
  }

  const double radius = 2.0 * std::sqrt(static_cast<double>(n));
  struct Candidate {
    double d2;
    double angle;
    Cell cell;
  };
  std::vector<Candidate> candidates;
  const int r = static_cast<int>(std::ceil(radius)) + 1;
  for (int y = static_cast<int>(std::floor(ty)) - r; y <= static_cast<int>(std::ceil(ty)) + r; ++y) {
    for (int x = static_cast<int>(std::floor(tx)) - r; x <= static_cast<int>(std::ceil(tx)) + r; ++x) {
      const Cell c{x, y};
      if (!site.in_bounds(c) || site.on_boundary(c) || site.is_wall(c)) continue;
      const double dx = x - tx;
      const double dy = y - ty;
      const double d2 = dx * dx + dy * dy;
      if (d2 > radius * radius) continue;
      candidates.push_back({d2, normalize_degrees(std::atan2(dy, dx) * 180.0 / 3.14159265358979323846), c});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.angle != b.angle) return a.angle < b.angle;
    return a.cell < b.cell;
  });
  if (candidates.size() < static_cast<std::size_t>(n)) {
    throw InsufficientSpace("only " + std::to_string(candidates.size()) + " free cells near the " +
                            std::string(to_string(departure)) + " for " + std::to_string(n) + " robots");
  }
  std::vector<Pose> poses;
  poses.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    poses.push_back({candidates[static_cast<std::size_t>(i)].cell, quantize(initial_direction(i, n, bias))});
  }
  return poses;
}

double coverage(const GridSite& site, const std::vector<int>& entered_room_ids) {
  std::vector<bool> seen(site.rooms().size(), false);
  std::size_t count = 0;
  for (int id : entered_room_ids) {
    const int idx = site.index_of_room(id);
    if (idx < 0) throw DomainError("unknown room id " + std::to_string(id));
    if (!seen[static_cast<std::size_t>(idx)]) {
      seen[static_cast<std::size_t>(idx)] = true;
      ++count;
    }
  }
  if (site.rooms().empty()) return 1.0;
  return static_cast<double>(count) / static_cast<double>(site.rooms().size());
}

std::shared_ptr<const GridSite> resolve_site(const SimConfig& config) {
  if (const auto* p = std::get_if<std::shared_ptr<const GridSite>>(&config.site)) {
    if (!*p) throw DomainError("simulation config has a null site");
    return *p;
  }
  return std::make_shared<const GridSite>(generate(std::get<SiteGenParams>(config.site)));
}

Simulation::Simulation(std::shared_ptr<const GridSite> site, const SimConfig& config)
    : site_(std::move(site)), config_(config), scent_(*site_) {
  if (config.max_actions_per_robot < 1) throw DomainError("max_actions_per_robot must be positive");
  if (config.sample_interval < 1) throw DomainError("sample_interval must be positive");
  if (config.revisit_threshold < 1) throw DomainError("revisit_threshold must be positive");
  policy_params_.revisit_threshold = config.revisit_threshold;

  std::vector<Pose> poses;
  if (config.start_poses.empty()) {
    poses = place_robots(*site_, config.n_robots, config.departure, config.bias);
  } else {
    if (static_cast<int>(config.start_poses.size()) != config.n_robots) {
      throw DomainError("start pose count differs from n_robots");
    }
    for (std::size_t i = 0; i < config.start_poses.size(); ++i) {
      const Cell c = config.start_poses[i].cell;
      if (site_->is_wall(c)) throw DomainError("start pose on a wall or outside the site");
      for (std::size_t j = 0; j < i; ++j) {
        if (config.start_poses[j].cell == c) throw DomainError("two start poses share a cell");
      }
    }
    poses = config.start_poses;
  }
  const auto n = poses.size();
  const std::size_t rooms = site_->rooms().size();
  robots_.resize(n);
  arrival_smell_.assign(n, 0);
  contact_next_.assign(n, false);
  in_contact_.assign(n * n, false);
  room_entered_.assign(rooms, false);
  robot_rooms_.assign(n, std::vector<bool>(rooms, false));
  robot_room_counts_.assign(n, 0);
  victim_found_.assign(site_->victims().size(), false);
  rngs_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RobotState& r = robots_[i];
    r.id = static_cast<int>(i);
    r.pose = poses[i];
    r.preferred_direction = initial_direction(static_cast<int>(i), static_cast<int>(n), config.bias);
    rngs_.emplace_back(derive_seed(config.seed, i));
    record_.initial_poses.push_back(r.pose);
  }
  if (config.record_trace) record_.trace.emplace();
  for (std::size_t i = 0; i < n; ++i) enter_cell(i, robots_[i].pose.cell);
  // Robots deployed side by side start inside a contact episode, which is not a crash.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (chebyshev(robots_[i].pose.cell, robots_[j].pose.cell) <= 1) in_contact_[i * n + j] = true;
    }
  }
  end_of_tick();
}

double Simulation::total_coverage() const {
  if (room_entered_.empty()) return 1.0;
  return static_cast<double>(rooms_entered_) / static_cast<double>(room_entered_.size());
}

void Simulation::enter_cell(std::size_t robot, Cell c) {
  arrival_smell_[robot] = scent_.count(c);
  scent_.deposit(*site_, c);
  ++cell_entries_;
  int room = site_->room_index(c);
  while (room >= 0) {
    const auto r = static_cast<std::size_t>(room);
    if (!room_entered_[r]) {
      room_entered_[r] = true;
      ++rooms_entered_;
    }
    if (!robot_rooms_[robot][r]) {
      robot_rooms_[robot][r] = true;
      ++robot_room_counts_[robot];
    }
    const auto& parent = site_->rooms()[r].parent;
    room = parent ? site_->index_of_room(*parent) : -1;
  }
}

void Simulation::step() {
  if (finished_) throw ContractViolation("simulation already finished");
  ++tick_;
  const std::vector<RobotState> snapshot = robots_;
  std::vector<Cell> positions;
  positions.reserve(snapshot.size());
  for (const RobotState& r : snapshot) positions.push_back(r.pose.cell);

  const AlgorithmKind kind = config_.algorithm;
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    SenseBundle senses;
    senses.ranging = range_scan(*site_, snapshot, i);
    senses.ranging.contact_event = contact_next_[i];
    if (uses_gas(kind)) senses.smell_count = arrival_smell_[i];
    if (uses_sound(kind)) senses.auditory = listen(positions, static_cast<int>(i));
    senses.orientation = orient(robots_[i]);

    const Decision d = decide(kind, robots_[i], senses, rngs_[i], policy_params_);
    RobotState next = d.next;
    const Pose before = robots_[i].pose;
    bool blocked_by_robot = false;
    bool moved = false;
    if (d.action.type == Action::Type::Turn) {
      next.pose.heading = quantize(d.action.target);
      next.advanced_last = false;
    } else if (blocked_by_wall(*site_, before.cell, before.heading)) {
      next.advanced_last = false;
    } else {
      const Cell target = before.cell + before.heading.step();
      blocked_by_robot = std::any_of(robots_.begin(), robots_.end(),
                                     [&](const RobotState& o) { return o.pose.cell == target; });
      if (!blocked_by_robot) {
        next.pose.cell = target;
        moved = true;
      }
      next.advanced_last = moved;
    }
    contact_next_[i] = blocked_by_robot;
    robots_[i] = next;
    if (moved) enter_cell(i, next.pose.cell);

    if (record_.trace) {
      record_.trace->push_back({tick_, static_cast<int>(i), before, next.pose, d.action, d.trigger,
                                snapshot[i].fsm, next.fsm, senses.smell_count});
    }
  }
  end_of_tick();
}

void Simulation::end_of_tick() {
  const std::size_t n = robots_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool touching = chebyshev(robots_[i].pose.cell, robots_[j].pose.cell) <= 1;
      auto&& flag = in_contact_[i * n + j];
      if (touching && !flag) {
        ++crash_count_;
        contact_next_[i] = true;
        contact_next_[j] = true;
      }
      flag = touching;
    }
  }
  const auto& victims = site_->victims();
  for (std::size_t v = 0; v < victims.size(); ++v) {
    if (victim_found_[v]) continue;
    for (const RobotState& r : robots_) {
      if (euclidean(victims[v].position, r.pose.cell) <= kVictimDetectionRadius) {
        victim_found_[v] = true;
        record_.victims_found.push_back({static_cast<int>(v), tick_});
        break;
      }
    }
  }
  if (total_coverage() >= 1.0) {
    finish(true);
  } else if (tick_ >= config_.max_actions_per_robot) {
    finish(false);
  } else if (tick_ > 0 && tick_ % config_.sample_interval == 0) {
    take_sample();
  }
}

void Simulation::take_sample() {
  Sample s;
  s.action_count = tick_;
  s.total_coverage = total_coverage();
  const double rooms = static_cast<double>(room_entered_.size());
  for (int count : robot_room_counts_) s.per_robot_coverage.push_back(rooms == 0.0 ? 1.0 : count / rooms);
  s.crash_count = crash_count_;
  record_.samples.push_back(std::move(s));
}

void Simulation::finish(bool early) {
  if (record_.samples.empty() || record_.samples.back().action_count != tick_) take_sample();
  finished_ = true;
  record_.terminated_early = early;
  record_.final_coverage = record_.samples.back().total_coverage;
  record_.actions_per_robot = tick_;
  record_.crash_count = crash_count_;
  record_.rooms_total = static_cast<int>(room_entered_.size());
  record_.rooms_entered = rooms_entered_;
}

RunRecord Simulation::run() {
  while (!finished_) step();
  return record_;
}

RunRecord run(const SimConfig& config) {
  Simulation sim(config);
  return sim.run();
}

std::vector<Pose> replay_poses(const GridSite& site, const std::vector<Pose>& initial,
                               const std::vector<TraceEvent>& trace) {
  std::vector<Pose> poses = initial;
  std::vector<Pose> out;
  out.reserve(trace.size());
  for (const TraceEvent& e : trace) {
    if (e.robot < 0 || static_cast<std::size_t>(e.robot) >= poses.size()) {
      throw ValidationError("trace refers to unknown robot " + std::to_string(e.robot));
    }
    Pose& p = poses[static_cast<std::size_t>(e.robot)];
    if (e.action.type == Action::Type::Turn) {
      p.heading = quantize(e.action.target);
    } else if (!blocked_by_wall(site, p.cell, p.heading)) {
      const Cell target = p.cell + p.heading.step();
      if (std::none_of(poses.begin(), poses.end(), [&](const Pose& o) { return o.cell == target; })) p.cell = target;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace swarm
