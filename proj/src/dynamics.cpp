#include "ardq/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace ardq {

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Hover: return "hover";
    case Action::East: return "east";
    case Action::West: return "west";
    case Action::North: return "north";
    case Action::South: return "south";
    case Action::Land: return "land";
  }
  return "?";
}

void RewardWeights::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(cell) || !finite(data) || !finite(safety) || !finite(move) || !finite(crash))
    throw std::invalid_argument("rewards: weights must be finite");
  if (cell < 0.0 || data < 0.0) throw std::invalid_argument("rewards: cell and data rewards must be >= 0");
  if (safety > 0.0 || move > 0.0 || crash > 0.0)
    throw std::invalid_argument("rewards: safety, move and crash penalties must be <= 0");
}

ActionMask legal_actions(const UavState& state, const EnvironmentMap& map) {
  ActionMask mask;
  mask.set();
  if (!is_landing(map.at(state.position))) mask.reset(index_of(Action::Land));
  return mask;
}

FilteredAction safety_filter(const UavState& state, Action action, const EnvironmentMap& map) {
  const Coord d = displacement(action);
  if (d.x == 0 && d.y == 0) return {action, false};
  const Coord next{state.position.x + d.x, state.position.y + d.y};
  if (!map.contains(next) || no_occupy(map.at(next))) return {Action::Hover, true};
  return {action, false};
}

StepOutcome step(const UavState& state, Action action, const EnvironmentMap& map) {
  if (!state.operational) throw std::logic_error("step: UAV is no longer operational");
  if (state.battery <= 0) throw std::logic_error("step: battery already exhausted");
  if (!legal_actions(state, map).test(index_of(action)))
    throw std::logic_error("step: action '" + std::string(action_name(action)) + "' is not legal here");

  const FilteredAction filtered = safety_filter(state, action, map);
  StepOutcome out{state, {}};
  out.flags.blocked = filtered.blocked;

  const Coord d = displacement(filtered.action);
  out.state.position = {state.position.x + d.x, state.position.y + d.y};
  if (filtered.action == Action::Land) {
    out.state.operational = false;
    out.state.airborne = false;
    out.flags.landed = true;
  }
  out.state.battery = state.battery - 1;
  out.flags.crashed = out.state.battery == 0 && out.state.operational;
  return out;
}

double step_reward(const StepFlags& flags, int newly_covered_cells, double collected_data,
                   const RewardWeights& weights) {
  double r = weights.cell * newly_covered_cells + weights.data * collected_data;
  if (flags.blocked) r += weights.safety;
  if (!flags.landed) r += weights.move;
  if (flags.crashed) r += weights.crash;
  return r;
}

}  // namespace ardq
