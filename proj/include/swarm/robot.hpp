#pragma once

#include <optional>
#include <string_view>

#include "swarm/geometry.hpp"

namespace swarm {

enum class FsmState { JustStarted, FollowingWall };

std::string_view to_string(FsmState s);

struct RobotState {
  int id = 0;
  Pose pose;
  FsmState fsm = FsmState::JustStarted;
  double preferred_direction = 0.0;  // degrees, [0, 360)
  std::optional<Side> follow_side;   // set iff fsm == FollowingWall
  bool redirect_pending = false;     // armed at a scented outer corner
  bool reversal_done = false;        // last redirect included the 180° reversal
  bool advanced_last = false;        // previous action moved one cell along the heading

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

}  // namespace swarm
