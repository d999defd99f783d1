#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "swarm/rng.hpp"
#include "swarm/robot.hpp"
#include "swarm/sensing.hpp"

namespace swarm {

enum class AlgorithmKind { Random, Minimum, UsingSound, UsingGas, UsingGasAndSound };

inline constexpr std::array<AlgorithmKind, 5> kAllAlgorithms{
    AlgorithmKind::Random, AlgorithmKind::Minimum, AlgorithmKind::UsingSound, AlgorithmKind::UsingGas,
    AlgorithmKind::UsingGasAndSound};

/// Canonical config/CLI names: random, minimum, sound, gas, gas_sound.
std::string_view canonical_name(AlgorithmKind kind);
std::optional<AlgorithmKind> parse_algorithm(std::string_view name);

constexpr bool uses_sound(AlgorithmKind k) {
  return k == AlgorithmKind::UsingSound || k == AlgorithmKind::UsingGasAndSound;
}
constexpr bool uses_gas(AlgorithmKind k) {
  return k == AlgorithmKind::UsingGas || k == AlgorithmKind::UsingGasAndSound;
}

struct Action {
  enum class Type { GoStraight, Turn };
  Type type = Type::GoStraight;
  double target = 0.0;  // azimuth for Turn, degrees in [0, 360)

  static Action go_straight() { return {Type::GoStraight, 0.0}; }
  static Action turn(double azimuth) { return {Type::Turn, normalize_degrees(azimuth)}; }

  friend bool operator==(const Action&, const Action&) = default;
};

struct SenseBundle {
  RangingReading ranging;
  std::optional<std::uint32_t> smell_count;  // gas-bearing kinds only
  std::optional<AuditoryReading> auditory;   // sound-bearing kinds only
  double orientation = 0.0;
};

enum class Trigger { None, HittingWall, HittingOthers, AtOuterCorner };

std::string_view to_string(Trigger t);

/// What a transition does, independent of the concrete sensor values.
enum class ActionClass {
  Advance,               // go straight (along the preferred direction when just started)
  WallFollowTurn,        // rotate away from the followed side at an obstruction
  EngageFixedSide,       // start following with the global right-hand side
  EngageTowardDirection, // refresh direction by sound, follow on the side heading toward it
  RandomTurn,            // face a uniformly random heading
  ForwardOrRandomTurn,   // coin flip between going straight and a random turn
  TurnRight,             // common -90° dodge after touching another robot
  TurnToPreferred,       // leave the wall along the preferred direction
  TurnToUpdatedPreferred,// refresh direction by sound and leave the wall along it
  RedirectIfRevisited,   // scent-armed redirect to the preferred direction
  RedirectUpdatedIfRevisited,  // scent-armed redirect to the sound-refreshed direction
};

std::string_view to_string(ActionClass a);

struct Transition {
  FsmState next;
  ActionClass action;
  // State when a conditional action declines to fire (scent redirects only).
  std::optional<FsmState> otherwise;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Static (state x trigger) -> transition map for one algorithm.
class TransitionTable {
 public:
  const Transition& at(FsmState s, Trigger t) const {
    return table_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
  }
  Transition& at(FsmState s, Trigger t) { return table_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)]; }

 private:
  std::array<std::array<Transition, 4>, 2> table_{};
};

TransitionTable transition_table(AlgorithmKind kind);

struct PolicyParams {
  int revisit_threshold = 3;  // visits at the firing corner that trigger the 180° reversal
};

/// (i × 360/n + bias) mod 360. Throws DomainError when n = 0 or i is outside [0, n).
double initial_direction(int i, int n, double bias);

/// Azimuth pointing away from the summed neighbour positions; returns
/// `current` unchanged when the sum has magnitude below 1e-9 cells.
double opposite_direction(const AuditoryReading& reading, double current);

struct Decision {
  Action action;
  RobotState next;
  Trigger trigger = Trigger::None;
};

/// One FSM step. Pure in (kind, state, senses, rng draws). Throws
/// ContractViolation when the sense bundle does not match the algorithm.
Decision decide(AlgorithmKind kind, const RobotState& state, const SenseBundle& senses, Rng& rng,
                const PolicyParams& params = {});

/// Highest-priority trigger present in a reading: others > corner > wall.
/// An open side wins over a blocked front, as in hand-on-wall following.
Trigger classify_trigger(const RangingReading& ranging);

}  // namespace swarm
