#include <gtest/gtest.h>

#include "ardq/checks/oracles.hpp"
#include "ardq/episode.hpp"
#include "fixtures.hpp"

using namespace ardq;
using ardq::testing::shared_map;

namespace {

std::shared_ptr<const EnvironmentMap> field() {
  return shared_map({"........", "........", "........", "........", "........", "........", "LL......",
                     "LL......"});
}

}  // namespace

TEST(Episode, StartsAirborneOnLandingCellWithFovApplied) {
  ScenarioSpec spec;
  spec.rng_seed = 3;
  spec.movement_budget = {30, 30};
  const Episode ep = Episode::from_spec(field(), spec, {});
  EXPECT_TRUE(is_landing(ep.map().at(ep.uav().position)));
  EXPECT_TRUE(ep.uav().airborne);
  EXPECT_EQ(ep.uav().battery, 30);
  for (Coord c : oracle::fov(ep.map(), ep.uav().position)) EXPECT_EQ(ep.mission().target_layer[c], 0.0);
  EXPECT_EQ(ep.path().size(), 1u);
  EXPECT_EQ(ep.initial_mission().initial_total, ep.initial_mission().remaining_total());
}

TEST(Episode, SameSeedSameTrajectory) {
  ScenarioSpec spec;
  spec.mission = MissionType::Dh;
  spec.device_count = 4;
  spec.rng_seed = 11;
  Episode a = Episode::from_spec(field(), spec, {});
  Episode b = Episode::from_spec(field(), spec, {});
  const Action moves[] = {Action::North, Action::East, Action::North, Action::Hover, Action::East};
  for (Action m : moves) {
    const StepResult ra = a.step(m);
    const StepResult rb = b.step(m);
    EXPECT_EQ(ra.reward, rb.reward);
    EXPECT_EQ(ra.collected, rb.collected);
  }
  EXPECT_EQ(a.mission().target_layer, b.mission().target_layer);
}

TEST(Episode, CrashEndsEpisodeWithPenalty) {
  ScenarioSpec spec;
  spec.movement_budget = {2, 2};
  Episode ep = Episode::from_spec(field(), spec, {});
  ep.step(Action::North);
  EXPECT_FALSE(ep.done());
  const StepResult r = ep.step(Action::North);
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.flags.crashed);
  const RewardWeights w;
  EXPECT_DOUBLE_EQ(r.reward, w.crash + w.move + w.cell * r.newly_covered);
  EXPECT_FALSE(ep.landed());
  EXPECT_FALSE(ep.metrics().landed);
  EXPECT_THROW(ep.step(Action::Hover), std::logic_error);
}

TEST(Episode, LandingEndsEpisodeAndFreezesState) {
  ScenarioSpec spec;
  spec.movement_budget = {10, 10};
  Episode ep = Episode::from_spec(field(), spec, {});
  const StepResult r = ep.step(Action::Land);
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.flags.landed);
  EXPECT_TRUE(ep.landed());
  EXPECT_EQ(ep.steps_taken(), 1);
  const UavState frozen = ep.uav();
  EXPECT_THROW(ep.step(Action::Hover), std::logic_error);
  EXPECT_EQ(ep.uav(), frozen);
  EXPECT_TRUE(ep.metrics().landed);
}

TEST(Episode, CoverageRewardMatchesNewlyCoveredCells) {
  ScenarioSpec spec;
  spec.rng_seed = 21;
  spec.movement_budget = {40, 40};
  Episode ep = Episode::from_spec(field(), spec, {});
  const RewardWeights w;
  for (int i = 0; i < 6; ++i) {
    const double before = ep.mission().remaining_total();
    const StepResult r = ep.step(i % 2 == 0 ? Action::North : Action::East);
    EXPECT_EQ(before - ep.mission().remaining_total(), r.newly_covered);
    EXPECT_DOUBLE_EQ(r.reward, step_reward(r.flags, r.newly_covered, 0.0, w));
  }
}
