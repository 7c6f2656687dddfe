#include "ardq/episode.hpp"

#include <stdexcept>

namespace ardq {

Episode::Episode(std::shared_ptr<const EnvironmentMap> map, MissionState mission, Launch launch, SimConfig config,
                 CounterRng rng)
    : map_(std::move(map)),
      initial_(mission),
      mission_(std::move(mission)),
      budget_(launch.movement_budget),
      config_(config),
      rng_(rng) {
  if (!map_) throw std::invalid_argument("episode: null map");
  if (budget_ < 1) throw std::invalid_argument("episode: movement budget must be positive");
  if (!map_->contains(launch.start) || no_occupy(map_->at(launch.start)))
    throw std::invalid_argument("episode: launch cell must be an occupiable cell on the grid");
  uav_ = UavState{launch.start, true, true, budget_};
  path_.push_back(uav_.position);
  if (mission_.mission == MissionType::Cpp) mission_ = apply_coverage(mission_, compute_fov(uav_.position, *map_)).state;
}

Episode Episode::from_spec(std::shared_ptr<const EnvironmentMap> map, const ScenarioSpec& spec, SimConfig config) {
  MissionState mission = generate_scenario(*map, spec);
  const Launch launch = draw_launch(*map, spec);
  CounterRng rng = CounterRng(spec.rng_seed).split(0xC4A77E1ULL);
  return Episode(std::move(map), std::move(mission), launch, config, rng);
}

void Episode::update_mission(StepResult& result) {
  if (mission_.mission == MissionType::Cpp) {
    auto update = apply_coverage(mission_, compute_fov(uav_.position, *map_));
    mission_ = std::move(update.state);
    result.newly_covered = update.newly_covered;
    return;
  }
  mission_ = apply_arrivals(mission_, config_.poisson_lambda, rng_);
  const HarvestPlan plan = schedule_and_collect(uav_, mission_.devices, *map_, config_.channel, rng_);
  auto update = apply_harvest(mission_, plan.collected);
  mission_ = std::move(update.state);
  result.collected = update.total_collected;
  result.throughput = plan.throughput;
  for (int d : plan.scheduled) result.scheduled_slots += d >= 0 ? 1 : 0;
}

StepResult Episode::step(Action action) {
  if (done()) throw std::logic_error("episode: step after the episode ended");
  const StepOutcome out = ardq::step(uav_, action, *map_);
  uav_ = out.state;
  path_.push_back(uav_.position);
  StepResult result;
  result.flags = out.flags;
  if (uav_.operational) update_mission(result);
  result.reward = step_reward(result.flags, result.newly_covered, result.collected, config_.rewards);
  result.done = done();
  return result;
}

}  // namespace ardq
