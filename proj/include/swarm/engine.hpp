#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "swarm/policy.hpp"
#include "swarm/robot.hpp"
#include "swarm/sensing.hpp"
#include "swarm/sitegen.hpp"
#include "swarm/world.hpp"

namespace swarm {

enum class Departure { Center, Edge };

std::string_view to_string(Departure d);
std::optional<Departure> parse_departure(std::string_view name);

struct SimConfig {
  std::variant<std::shared_ptr<const GridSite>, SiteGenParams> site;
  AlgorithmKind algorithm = AlgorithmKind::UsingGasAndSound;
  int n_robots = 2;
  Departure departure = Departure::Center;
  int max_actions_per_robot = 1000;
  int sample_interval = 100;
  std::uint64_t seed = 0;
  int revisit_threshold = 3;
  double bias = 0.0;
  bool record_trace = false;
  // Hand-placed start poses for scripted scenarios; empty means place_robots.
  std::vector<Pose> start_poses;
};

struct Sample {
  int action_count = 0;
  double total_coverage = 0.0;
  std::vector<double> per_robot_coverage;
  int crash_count = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct VictimFind {
  int victim = 0;
  int action_count = 0;

  friend bool operator==(const VictimFind&, const VictimFind&) = default;
};

struct TraceEvent {
  int tick = 0;  // 1-based action number of this robot
  int robot = 0;
  Pose before;
  Pose after;
  Action action;
  Trigger trigger = Trigger::None;
  FsmState fsm_before = FsmState::JustStarted;
  FsmState fsm_after = FsmState::JustStarted;
  std::optional<std::uint32_t> smell;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct RunRecord {
  std::vector<Sample> samples;
  double final_coverage = 0.0;
  std::vector<VictimFind> victims_found;
  bool terminated_early = false;
  int actions_per_robot = 0;  // actions each robot actually took
  int crash_count = 0;
  int rooms_total = 0;
  int rooms_entered = 0;
  std::vector<Pose> initial_poses;
  std::optional<std::vector<TraceEvent>> trace;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Start poses: the n free interior cells nearest the centroid (Center) or the
/// entrance midpoint (Edge), ordered by distance then angle. Robot i faces
/// initial_direction(i, n, bias), quantized. Throws InsufficientSpace when
/// fewer than n cells lie within 2√n cells of the target.
std::vector<Pose> place_robots(const GridSite& site, int n, Departure departure, double bias = 0.0);

/// |entered| / |rooms| (1 for a site without rooms). Throws DomainError for an unknown id.
double coverage(const GridSite& site, const std::vector<int>& entered_room_ids);

/// Resolves the site of a config (generating it when given parameters).
std::shared_ptr<const GridSite> resolve_site(const SimConfig& config);

class Simulation {
 public:
  Simulation(std::shared_ptr<const GridSite> site, const SimConfig& config);
  explicit Simulation(const SimConfig& config) : Simulation(resolve_site(config), config) {}

  /// One action for every robot. Throws ContractViolation once finished.
  void step();
  bool finished() const { return finished_; }

  /// Steps until finished and returns the record.
  RunRecord run();
  const RunRecord& record() const { return record_; }

  const GridSite& site() const { return *site_; }
  const std::vector<RobotState>& robots() const { return robots_; }
  const ScentField& scent() const { return scent_; }
  int actions_per_robot() const { return tick_; }
  int crash_count() const { return crash_count_; }
  double total_coverage() const;
  std::uint64_t cell_entries() const { return cell_entries_; }

 private:
  void enter_cell(std::size_t robot, Cell c);
  void end_of_tick();
  void take_sample();
  void finish(bool early);

  std::shared_ptr<const GridSite> site_;
  SimConfig config_;
  PolicyParams policy_params_;
  std::vector<RobotState> robots_;
  std::vector<Rng> rngs_;
  ScentField scent_;
  std::vector<std::uint32_t> arrival_smell_;
  std::vector<bool> contact_next_;
  std::vector<bool> in_contact_;  // n × n pair flags for the current contact episode
  std::vector<bool> room_entered_;
  std::vector<std::vector<bool>> robot_rooms_;
  std::vector<int> robot_room_counts_;
  int rooms_entered_ = 0;
  std::vector<bool> victim_found_;
  int tick_ = 0;
  int crash_count_ = 0;
  std::uint64_t cell_entries_ = 0;
  bool finished_ = false;
  RunRecord record_;
};

RunRecord run(const SimConfig& config);

/// Re-applies the recorded actions from the initial poses (no policy calls)
/// and returns the pose sequence after every event, in trace order.
std::vector<Pose> replay_poses(const GridSite& site, const std::vector<Pose>& initial,
                               const std::vector<TraceEvent>& trace);

}  // namespace swarm
