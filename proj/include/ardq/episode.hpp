#pragma once

#include <memory>
#include <vector>

#include "ardq/dynamics.hpp"
#include "ardq/missions.hpp"
#include "ardq/radio.hpp"
#include "ardq/rng.hpp"
#include "ardq/scenario.hpp"
#include "ardq/world.hpp"

namespace ardq {

struct SimConfig {
  ChannelParams channel;
  RewardWeights rewards;
  double poisson_lambda = 0.0;  // DH data arrivals per device and mission slot
};

struct StepResult {
  double reward = 0.0;
  StepFlags flags;
  int newly_covered = 0;
  double collected = 0.0;
  double throughput = 0.0;
  int scheduled_slots = 0;  // communication slots with a device served
  bool done = false;
};

/// One CPP or DH episode on a shared, immutable map.
///
/// The UAV starts airborne over its launch cell; the camera footprint at the
/// start cell is applied immediately (without reward). Every step runs the
/// safety filter and dynamics, then, while the UAV is still airborne, the
/// mission update at the new position. The episode ends on landing or when
/// the battery runs out in the air.
class Episode {
 public:
  Episode(std::shared_ptr<const EnvironmentMap> map, MissionState mission, Launch launch, SimConfig config,
          CounterRng rng);

  /// Convenience: scenario + launch drawn from `spec`, channel RNG split from its seed.
  static Episode from_spec(std::shared_ptr<const EnvironmentMap> map, const ScenarioSpec& spec, SimConfig config);

  StepResult step(Action action);

  bool done() const { return !uav_.operational || uav_.battery == 0; }
  bool landed() const { return !uav_.operational; }
  ActionMask legal() const { return legal_actions(uav_, *map_); }

  const EnvironmentMap& map() const { return *map_; }
  const UavState& uav() const { return uav_; }
  const MissionState& mission() const { return mission_; }
  const MissionState& initial_mission() const { return initial_; }
  int movement_budget() const { return budget_; }
  int steps_taken() const { return budget_ - uav_.battery; }
  const std::vector<Coord>& path() const { return path_; }
  Metrics metrics() const { return episode_metrics(initial_, mission_, landed()); }

 private:
  void update_mission(StepResult& result);

  std::shared_ptr<const EnvironmentMap> map_;
  MissionState initial_;
  MissionState mission_;
  UavState uav_;
  int budget_;
  SimConfig config_;
  CounterRng rng_;
  std::vector<Coord> path_;
};

}  // namespace ardq
