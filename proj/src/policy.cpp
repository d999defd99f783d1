#include "swarm/policy.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

#include "swarm/errors.hpp"

namespace swarm {

std::string_view canonical_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::Random: return "random";
    case AlgorithmKind::Minimum: return "minimum";
    case AlgorithmKind::UsingSound: return "sound";
    case AlgorithmKind::UsingGas: return "gas";
    case AlgorithmKind::UsingGasAndSound: return "gas_sound";
  }
  return "unknown";
}

std::optional<AlgorithmKind> parse_algorithm(std::string_view name) {
  for (AlgorithmKind k : kAllAlgorithms) {
    if (canonical_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Trigger t) {
  switch (t) {
    case Trigger::None: return "none";
    case Trigger::HittingWall: return "hitting_wall";
    case Trigger::HittingOthers: return "hitting_others";
    case Trigger::AtOuterCorner: return "at_outer_corner";
  }
  return "unknown";
}

std::string_view to_string(ActionClass a) {
  switch (a) {
    case ActionClass::Advance: return "advance";
    case ActionClass::WallFollowTurn: return "wall_follow_turn";
    case ActionClass::EngageFixedSide: return "engage_fixed_side";
    case ActionClass::EngageTowardDirection: return "engage_toward_direction";
    case ActionClass::RandomTurn: return "random_turn";
    case ActionClass::ForwardOrRandomTurn: return "forward_or_random_turn";
    case ActionClass::TurnRight: return "turn_right";
    case ActionClass::TurnToPreferred: return "turn_to_preferred";
    case ActionClass::TurnToUpdatedPreferred: return "turn_to_updated_preferred";
    case ActionClass::RedirectIfRevisited: return "redirect_if_revisited";
    case ActionClass::RedirectUpdatedIfRevisited: return "redirect_updated_if_revisited";
  }
  return "unknown";
}

TransitionTable transition_table(AlgorithmKind kind) {
  using enum FsmState;
  TransitionTable t;
  t.at(JustStarted, Trigger::None) = {JustStarted, ActionClass::Advance, std::nullopt};
  t.at(FollowingWall, Trigger::None) = {FollowingWall, ActionClass::Advance, std::nullopt};
  t.at(JustStarted, Trigger::HittingOthers) = {JustStarted, ActionClass::TurnRight, std::nullopt};
  t.at(FollowingWall, Trigger::HittingOthers) = {JustStarted, ActionClass::TurnRight, std::nullopt};

  switch (kind) {
    case AlgorithmKind::Random:
      t.at(JustStarted, Trigger::HittingWall) = {FollowingWall, ActionClass::RandomTurn, std::nullopt};
      t.at(FollowingWall, Trigger::HittingWall) = {FollowingWall, ActionClass::RandomTurn, std::nullopt};
      t.at(FollowingWall, Trigger::AtOuterCorner) = {FollowingWall, ActionClass::ForwardOrRandomTurn, std::nullopt};
      t.at(JustStarted, Trigger::AtOuterCorner) = {JustStarted, ActionClass::ForwardOrRandomTurn, std::nullopt};
      break;
    case AlgorithmKind::Minimum:
      t.at(JustStarted, Trigger::HittingWall) = {FollowingWall, ActionClass::EngageFixedSide, std::nullopt};
      t.at(FollowingWall, Trigger::HittingWall) = {FollowingWall, ActionClass::WallFollowTurn, std::nullopt};
      t.at(FollowingWall, Trigger::AtOuterCorner) = {JustStarted, ActionClass::TurnToPreferred, std::nullopt};
      t.at(JustStarted, Trigger::AtOuterCorner) = {JustStarted, ActionClass::TurnToPreferred, std::nullopt};
      break;
    case AlgorithmKind::UsingSound:
      t.at(JustStarted, Trigger::HittingWall) = {FollowingWall, ActionClass::EngageTowardDirection, std::nullopt};
      t.at(FollowingWall, Trigger::HittingWall) = {FollowingWall, ActionClass::WallFollowTurn, std::nullopt};
      t.at(FollowingWall, Trigger::AtOuterCorner) = {JustStarted, ActionClass::TurnToUpdatedPreferred, std::nullopt};
      t.at(JustStarted, Trigger::AtOuterCorner) = {JustStarted, ActionClass::TurnToUpdatedPreferred, std::nullopt};
      break;
    case AlgorithmKind::UsingGas:
      t.at(JustStarted, Trigger::HittingWall) = {FollowingWall, ActionClass::EngageFixedSide, std::nullopt};
      t.at(FollowingWall, Trigger::HittingWall) = {FollowingWall, ActionClass::WallFollowTurn, std::nullopt};
      t.at(FollowingWall, Trigger::AtOuterCorner) = {JustStarted, ActionClass::RedirectIfRevisited, FollowingWall};
      t.at(JustStarted, Trigger::AtOuterCorner) = {JustStarted, ActionClass::TurnToPreferred, std::nullopt};
      break;
    case AlgorithmKind::UsingGasAndSound:
      t.at(JustStarted, Trigger::HittingWall) = {FollowingWall, ActionClass::EngageTowardDirection, std::nullopt};
      t.at(FollowingWall, Trigger::HittingWall) = {FollowingWall, ActionClass::WallFollowTurn, std::nullopt};
      t.at(FollowingWall, Trigger::AtOuterCorner) = {JustStarted, ActionClass::RedirectUpdatedIfRevisited, FollowingWall};
      t.at(JustStarted, Trigger::AtOuterCorner) = {JustStarted, ActionClass::TurnToUpdatedPreferred, std::nullopt};
      break;
  }
  return t;
}

double initial_direction(int i, int n, double bias) {
  if (n <= 0) throw DomainError("swarm size must be positive");
  if (i < 0 || i >= n) throw DomainError("robot index outside [0, n)");
  const std::int64_t numerator = static_cast<std::int64_t>(i) * 360;
  return normalize_degrees(static_cast<double>(numerator) / n + bias);
}

double opposite_direction(const AuditoryReading& reading, double current) {
  double sx = 0.0;
  double sy = 0.0;
  for (const AuditoryEntry& e : reading.neighbors) {
    const double rad = e.azimuth * std::numbers::pi / 180.0;
    sx += e.distance * std::cos(rad);
    sy += e.distance * std::sin(rad);
  }
  if (std::hypot(sx, sy) < 1e-9) return normalize_degrees(current);
  return normalize_degrees(std::atan2(-sy, -sx) * 180.0 / std::numbers::pi);
}

Trigger classify_trigger(const RangingReading& ranging) {
  if (ranging.contact_event) return Trigger::HittingOthers;
  if (ranging.at_outer_corner) return Trigger::AtOuterCorner;
  if (ranging.wall_ahead) return Trigger::HittingWall;
  return Trigger::None;
}

namespace {

// Heading (octants) of the wall face blocking a robot, for a given following side.
Heading blocking_face(Heading h, const RangingReading& r, Side side) {
  if (h.cardinal()) return h;
  const Heading cw = h.rotated(-1);
  const Heading ccw = h.rotated(1);
  if (r.wall_ahead_cw && !r.wall_ahead_ccw) return cw;
  if (r.wall_ahead_ccw && !r.wall_ahead_cw) return ccw;
  if (r.wall_ahead_cw && r.wall_ahead_ccw) return side == Side::Right ? ccw : cw;
  return side == Side::Right ? cw : ccw;  // only the diagonal cell is blocked
}

// Direction of travel once the wall `face` is kept on `side`.
Heading travel_along(Heading face, Side side) { return face.rotated(side == Side::Right ? 2 : -2); }

Heading random_heading(Rng& rng) { return Heading(static_cast<int>(rng.below(8))); }

void leave_wall(RobotState& s) {
  s.fsm = FsmState::JustStarted;
  s.follow_side.reset();
  s.redirect_pending = false;
}

}  // namespace

Decision decide(AlgorithmKind kind, const RobotState& state, const SenseBundle& senses, Rng& rng,
                const PolicyParams& params) {
  if (senses.auditory.has_value() != uses_sound(kind)) {
    throw ContractViolation("auditory reading must be present exactly for sound-bearing algorithms");
  }
  if (senses.smell_count.has_value() != uses_gas(kind)) {
    throw ContractViolation("smell reading must be present exactly for gas-bearing algorithms");
  }
  if (state.fsm == FsmState::FollowingWall && !state.follow_side) {
    throw ContractViolation("wall-following robot without a side");
  }

  const Trigger trigger = classify_trigger(senses.ranging);
  const Transition tr = transition_table(kind).at(state.fsm, trigger);
  const Heading heading = state.pose.heading;
  Decision d{Action::go_straight(), state, trigger};
  RobotState& next = d.next;

  auto enter_following = [&](Side side, Heading travel) {
    next.fsm = FsmState::FollowingWall;
    next.follow_side = side;
    next.redirect_pending = false;
    d.action = Action::turn(travel.degrees());
  };
  auto corner_follow = [&]() {
    const Side side = state.follow_side.value_or(Side::Right);
    d.action = Action::turn(heading.rotated(side == Side::Right ? -2 : 2).degrees());
  };
  auto redirect = [&](double base) {
    const bool reverse = senses.smell_count.value_or(0) >= static_cast<std::uint32_t>(params.revisit_threshold);
    const double target = normalize_degrees(base + (reverse ? 180.0 : 0.0));
    leave_wall(next);
    // The reversal only steers this turn. Keeping it in φ would flip φ on every
    // redirect and pin the robot between two doors.
    next.preferred_direction = normalize_degrees(base);
    next.reversal_done = reverse;
    d.action = Action::turn(target);
  };
  auto scent_redirect = [&](double base_if_firing) {
    if (state.redirect_pending) {
      redirect(base_if_firing);
      return;
    }
    next.fsm = tr.otherwise.value_or(FsmState::FollowingWall);
    if (senses.smell_count.value_or(0) >= 1) next.redirect_pending = true;
    corner_follow();
  };
  auto sound_direction = [&]() { return opposite_direction(*senses.auditory, state.preferred_direction); };

  switch (tr.action) {
    case ActionClass::Advance:
      d.action = Action::go_straight();
      break;
    case ActionClass::WallFollowTurn: {
      const Side side = state.follow_side.value_or(Side::Right);
      d.action = Action::turn(heading.rotated(side == Side::Right ? 2 : -2).degrees());
      break;
    }
    case ActionClass::EngageFixedSide: {
      const Side side = Side::Right;
      enter_following(side, travel_along(blocking_face(heading, senses.ranging, side), side));
      break;
    }
    case ActionClass::EngageTowardDirection: {
      const double toward = sound_direction();
      next.preferred_direction = toward;
      const Heading right = travel_along(blocking_face(heading, senses.ranging, Side::Right), Side::Right);
      const Heading left = travel_along(blocking_face(heading, senses.ranging, Side::Left), Side::Left);
      const bool go_left = angular_distance(left.degrees(), toward) < angular_distance(right.degrees(), toward);
      enter_following(go_left ? Side::Left : Side::Right, go_left ? left : right);
      break;
    }
    case ActionClass::RandomTurn:
      if (state.fsm == FsmState::JustStarted) {
        next.fsm = FsmState::FollowingWall;
        next.follow_side = rng.bernoulli(0.5) ? Side::Left : Side::Right;
      }
      d.action = Action::turn(random_heading(rng).degrees());
      break;
    case ActionClass::ForwardOrRandomTurn:
      if (rng.bernoulli(0.5)) {
        d.action = Action::go_straight();
      } else {
        d.action = Action::turn(random_heading(rng).degrees());
      }
      break;
    case ActionClass::TurnRight:
      leave_wall(next);
      d.action = Action::turn(heading.rotated(-2).degrees());
      break;
    case ActionClass::TurnToPreferred:
      leave_wall(next);
      d.action = Action::turn(state.preferred_direction);
      break;
    case ActionClass::TurnToUpdatedPreferred: {
      const double toward = sound_direction();
      leave_wall(next);
      next.preferred_direction = toward;
      d.action = Action::turn(toward);
      break;
    }
    case ActionClass::RedirectIfRevisited:
      scent_redirect(state.preferred_direction);
      break;
    case ActionClass::RedirectUpdatedIfRevisited:
      scent_redirect(state.redirect_pending ? sound_direction() : state.preferred_direction);
      break;
  }
  return d;
}

}  // namespace swarm
