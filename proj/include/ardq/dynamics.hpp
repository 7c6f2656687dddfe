#pragma once

#include <array>
#include <bitset>
#include <string_view>

#include "ardq/grid.hpp"
#include "ardq/world.hpp"

namespace ardq {

/// The six UAV actions. The enumerator value is the Q-network output index.
enum class Action : int { Hover = 0, East = 1, West = 2, North = 3, South = 4, Land = 5 };

inline constexpr int kActionCount = 6;
inline constexpr std::array<Action, kActionCount> kAllActions = {Action::Hover, Action::East,  Action::West,
                                                                 Action::North, Action::South, Action::Land};

using ActionMask = std::bitset<kActionCount>;

constexpr int index_of(Action a) { return static_cast<int>(a); }
constexpr Action action_at(int i) { return static_cast<Action>(i); }
std::string_view action_name(Action a);

/// Horizontal displacement in cells; zero for Hover and Land.
constexpr Coord displacement(Action a) {
  switch (a) {
    case Action::East: return {1, 0};
    case Action::West: return {-1, 0};
    case Action::North: return {0, 1};
    case Action::South: return {0, -1};
    default: return {0, 0};
  }
}

struct UavState {
  Coord position;
  bool airborne = true;     // altitude flag: true = at height h, false = on the ground
  bool operational = true;  // cleared once the UAV lands
  int battery = 0;          // remaining action steps

  friend bool operator==(const UavState&, const UavState&) = default;
};

struct StepFlags {
  bool blocked = false;  // safety controller replaced the action with Hover
  bool landed = false;
  bool crashed = false;  // battery exhausted while still airborne
};

struct RewardWeights {
  double cell = 0.4;     // per newly covered target cell
  double data = 0.1;     // per collected data unit
  double safety = -1.0;  // safety-controller intervention
  double move = -0.05;   // every step that does not complete the mission
  double crash = -5.0;

  void validate() const;
};

/// Hover is always legal; Land only on a landing cell.
ActionMask legal_actions(const UavState& state, const EnvironmentMap& map);

struct FilteredAction {
  Action action;
  bool blocked;
};

/// Replaces moves that would leave the grid or enter a no-occupy cell by Hover.
FilteredAction safety_filter(const UavState& state, Action action, const EnvironmentMap& map);

struct StepOutcome {
  UavState state;
  StepFlags flags;
};

/// One mission time slot. Applies the safety filter, moves, decrements the
/// battery and handles landing. Throws std::logic_error when called on an
/// inactive UAV, with an empty battery, or with an illegal Land.
StepOutcome step(const UavState& state, Action action, const EnvironmentMap& map);

double step_reward(const StepFlags& flags, int newly_covered_cells, double collected_data,
                   const RewardWeights& weights);

}  // namespace ardq
