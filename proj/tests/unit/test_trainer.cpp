#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "ardq/episode.hpp"
#include "ardq/trainer.hpp"
#include "fixtures.hpp"

using namespace ardq;

namespace {

/// Q_a(s) = w[2a] * battery_frac + w[2a+1].
class LinearModel final : public QModel {
 public:
  std::size_t param_count() const override { return 2 * kActionCount; }
  ActionValues forward(const Observation& obs, std::span<const double> p) const override {
    ActionValues q{};
    for (int a = 0; a < kActionCount; ++a)
      q[static_cast<std::size_t>(a)] = p[2 * static_cast<std::size_t>(a)] * obs.battery_frac + p[2 * static_cast<std::size_t>(a) + 1];
    return q;
  }
  void accumulate_gradient(const Observation& obs, std::span<const double> /*p*/, const ActionValues& dq,
                           std::span<double> grad) const override {
    for (int a = 0; a < kActionCount; ++a) {
      grad[2 * static_cast<std::size_t>(a)] += dq[static_cast<std::size_t>(a)] * obs.battery_frac;
      grad[2 * static_cast<std::size_t>(a) + 1] += dq[static_cast<std::size_t>(a)];
    }
  }
};

Observation state(double b) {
  Observation o;
  o.battery_frac = b;
  return o;
}

ActionMask all_legal() { return ActionMask{}.set(); }

Transition transition(double s, int a, double r, double s2, bool terminal) {
  return {state(s), a, r, state(s2), all_legal(), terminal};
}

}  // namespace

TEST(Replay, EvictsOldestFirst) {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) buf.push(transition(0, i, 0, 0, false));
  EXPECT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf.at(0).action, 2);
  EXPECT_EQ(buf.at(1).action, 3);
  EXPECT_EQ(buf.at(2).action, 4);
  EXPECT_THROW(buf.at(3), std::out_of_range);
}

TEST(Replay, SamplesEveryStoredIndex) {
  ReplayBuffer buf(4);
  for (int i = 0; i < 4; ++i) buf.push(transition(0, i, 0, 0, false));
  CounterRng rng(1);
  std::map<std::size_t, int> seen;
  for (int i = 0; i < 400; ++i) ++seen[buf.sample_index(rng)];
  EXPECT_EQ(seen.size(), 4u);
  for (const auto& [idx, n] : seen) EXPECT_LT(idx, 4u);
}

TEST(Replay, RejectsZeroCapacityAndEmptySampling) {
  EXPECT_THROW(ReplayBuffer(0), std::invalid_argument);
  ReplayBuffer buf(2);
  CounterRng rng(1);
  EXPECT_THROW(buf.sample_index(rng), std::logic_error);
}

TEST(Exploration, LinearEpsilonDecay) {
  Exploration e;
  e.kind = ExplorationKind::EpsilonGreedy;
  e.epsilon_start = 1.0;
  e.epsilon_end = 0.1;
  e.epsilon_decay_steps = 100;
  EXPECT_DOUBLE_EQ(e.value_at(0), 1.0);
  EXPECT_DOUBLE_EQ(e.value_at(50), 0.55);
  EXPECT_DOUBLE_EQ(e.value_at(100), 0.1);
  EXPECT_DOUBLE_EQ(e.value_at(1000), 0.1);
}

TEST(Exploration, SoftmaxTemperatureIsConstant) {
  Exploration e;
  e.temperature = 0.3;
  EXPECT_EQ(e.value_at(0), 0.3);
  EXPECT_EQ(e.value_at(123456), 0.3);
}

TEST(Greedy, MaskedArgmaxTiesToLowest) {
  const ActionValues q{1.0, 5.0, 5.0, 9.0, 0.0, 2.0};
  ActionMask legal = all_legal();
  EXPECT_EQ(greedy_action(q, legal), 3);
  legal.reset(3);
  EXPECT_EQ(greedy_action(q, legal), 1);
  EXPECT_THROW(greedy_action(q, ActionMask{}), std::logic_error);
}

TEST(Softmax, HandComputedProbabilities) {
  const ActionValues q{0.0, std::log(3.0), 100.0, 0.0, 0.0, 0.0};
  ActionMask legal;
  legal.set(0).set(1);
  const ActionValues p = softmax_policy(q, legal, 1.0);
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.75, 1e-15);
  for (int a = 2; a < kActionCount; ++a) EXPECT_EQ(p[static_cast<std::size_t>(a)], 0.0);
}

TEST(Select, NeverPicksIllegal) {
  const ActionValues q{10.0, -3.0, 7.0, 0.5, 2.0, 100.0};
  ActionMask legal;
  legal.set(1).set(3);
  CounterRng rng(2);
  for (int i = 0; i < 2000; ++i) {
    const int s = select_action(q, legal, ExplorationKind::Softmax, 5.0, rng);
    const int e = select_action(q, legal, ExplorationKind::EpsilonGreedy, 1.0, rng);
    EXPECT_TRUE(legal.test(static_cast<std::size_t>(s)));
    EXPECT_TRUE(legal.test(static_cast<std::size_t>(e)));
  }
}

TEST(Select, ZeroEpsilonIsGreedy) {
  const ActionValues q{1.0, 4.0, 2.0, 3.0, 0.0, 0.0};
  CounterRng rng(3);
  for (int i = 0; i < 100; ++i)
    EXPECT_EQ(select_action(q, all_legal(), ExplorationKind::EpsilonGreedy, 0.0, rng), 1);
}

TEST(Ddqn, MainSelectsTargetValues) {
  // Main prefers action 2 in s'; the target network values it at 3.
  const QFunction main = [](const Observation&) { return ActionValues{0.0, 1.0, 5.0, 0.0, 0.0, 0.0}; };
  const QFunction target = [](const Observation&) { return ActionValues{0.0, 10.0, 3.0, 0.0, 0.0, 0.0}; };
  const Transition t = transition(0.5, 0, 1.0, 0.4, false);
  const Transition* batch[] = {&t};
  const auto y = ddqn_targets(batch, main, target, 0.9);
  EXPECT_DOUBLE_EQ(y[0], 1.0 + 0.9 * 3.0);
}

TEST(Ddqn, TerminalIsReward) {
  const QFunction q = [](const Observation&) { return ActionValues{9, 9, 9, 9, 9, 9}; };
  const Transition t = transition(0.5, 0, -5.0, 0.4, true);
  const Transition* batch[] = {&t};
  EXPECT_EQ(ddqn_targets(batch, q, q, 0.9)[0], -5.0);
}

TEST(Ddqn, SelectionRespectsNextMask) {
  const QFunction main = [](const Observation&) { return ActionValues{0.0, 1.0, 5.0, 0.0, 0.0, 0.0}; };
  const QFunction target = [](const Observation&) { return ActionValues{0.0, 10.0, 3.0, 0.0, 0.0, 0.0}; };
  Transition t = transition(0.5, 0, 0.0, 0.4, false);
  t.next_legal.reset(2);
  const Transition* batch[] = {&t};
  EXPECT_DOUBLE_EQ(ddqn_targets(batch, main, target, 0.5)[0], 5.0);
}

TEST(SoftUpdate, Identities) {
  const std::vector<double> main{1.0, -2.0, 3.5};
  std::vector<double> t{0.5, 0.25, -1.0};
  const std::vector<double> before = t;
  soft_update(t, main, 0.0);
  EXPECT_EQ(t, before);
  soft_update(t, main, 1.0);
  EXPECT_EQ(t, main);
  std::vector<double> s{0.0};
  const std::vector<double> one{1.0};
  soft_update(s, one, 0.005);
  EXPECT_DOUBLE_EQ(s[0], 0.005);
  EXPECT_THROW(soft_update(s, main, 0.5), std::invalid_argument);
}

TEST(Clip, ScalesToMaxNorm) {
  std::vector<double> g{3.0, 4.0};
  EXPECT_DOUBLE_EQ(clip_global_norm(g, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(g[0], 0.6);
  EXPECT_DOUBLE_EQ(g[1], 0.8);
  std::vector<double> small{0.1, 0.1};
  clip_global_norm(small, 1.0);
  EXPECT_EQ(small, (std::vector<double>{0.1, 0.1}));
}

TEST(Optimizer, SgdStep) {
  TrainerConfig c;
  c.optimizer = OptimizerKind::Sgd;
  c.learning_rate = 0.1;
  c.grad_clip = 0.0;
  Optimizer opt(c, 2);
  std::vector<double> p{1.0, 2.0}, g{0.5, -1.0};
  opt.step(p, g);
  EXPECT_DOUBLE_EQ(p[0], 0.95);
  EXPECT_DOUBLE_EQ(p[1], 2.1);
}

TEST(Optimizer, AdamFirstStepIsSignTimesRate) {
  TrainerConfig c;
  c.optimizer = OptimizerKind::Adam;
  c.learning_rate = 0.01;
  c.grad_clip = 0.0;
  Optimizer opt(c, 2);
  std::vector<double> p{0.0, 0.0}, g{3.0, -0.2};
  opt.step(p, g);
  EXPECT_NEAR(p[0], -0.01, 1e-9);
  EXPECT_NEAR(p[1], 0.01, 1e-9);
  EXPECT_EQ(opt.steps(), 1);
}

TEST(TrainStep, ReducesLossOnFixedBuffer) {
  const LinearModel model;
  TrainerConfig c;
  c.batch_size = 4;
  c.learning_rate = 0.05;
  c.gamma = 0.0;
  ReplayBuffer buf(8);
  for (int i = 0; i < 8; ++i) buf.push(transition(0.1 * i, i % kActionCount, 1.0 + 0.1 * i, 0.0, false));
  std::vector<double> main(model.param_count(), 0.0), target = main;
  Optimizer opt(c, main.size());
  CounterRng rng(4);
  double first = 0.0, last = 0.0;
  for (int it = 0; it < 400; ++it) {
    const double l = train_step(buf, model, main, target, c, opt, rng);
    if (it == 0) first = l;
    last = l;
  }
  EXPECT_LT(last, 0.1 * first);
}

TEST(TrainStep, DivergenceIsReported) {
  const LinearModel model;
  TrainerConfig c;
  c.batch_size = 1;
  ReplayBuffer buf(1);
  buf.push(transition(0.5, 0, std::numeric_limits<double>::infinity(), 0.0, true));
  std::vector<double> main(model.param_count(), 0.0), target = main;
  Optimizer opt(c, main.size());
  CounterRng rng(1);
  EXPECT_THROW(train_step(buf, model, main, target, c, opt, rng), std::runtime_error);
}

TEST(Log, CsvHeaderAndEmptyEvalColumns) {
  TrainingLogRow a;
  a.step = 10;
  a.episode = 2;
  a.loss = 0.5;
  a.exploration = 0.1;
  TrainingLogRow b = a;
  b.step = 20;
  b.eval_landing_ratio = 1.0;
  b.eval_primary_ratio = 0.75;
  EXPECT_EQ(training_log_csv({a, b}),
            "step,episode,loss,epsilon_or_temp,eval_landing_ratio,eval_primary_ratio\n"
            "10,2,0.5,0.1,,\n"
            "20,2,0.5,0.1,1,0.75\n");
}

namespace {

TrainingResult tiny_run(std::uint64_t seed, long steps) {
  auto map = std::make_shared<const EnvironmentMap>(ardq::testing::open_map(4));
  ScenarioSpec spec;
  spec.movement_budget = {6, 10};
  spec.cpp_zone_count = {1, 1};
  const LinearModel model;
  TrainerConfig c;
  c.total_steps = steps;
  c.batch_size = 4;
  c.buffer_capacity = 50;
  c.log_interval = 7;
  c.learning_rate = 0.01;
  ObsParams obs;
  obs.local_size = 3;
  obs.global_scale = 2;
  const EpisodeFactory make = [&](long i) {
    ScenarioSpec s = spec;
    s.rng_seed = 1000 + static_cast<std::uint64_t>(i);
    return Episode::from_spec(map, s, SimConfig{});
  };
  return run_training(make, obs, model, std::vector<double>(model.param_count(), 0.1), c, seed);
}

}  // namespace

TEST(RunTraining, ReproducibleAndLogged) {
  const TrainingResult a = tiny_run(5, 60);
  const TrainingResult b = tiny_run(5, 60);
  EXPECT_EQ(a.main, b.main);
  EXPECT_EQ(a.target, b.target);
  EXPECT_GT(a.episodes, 1);
  ASSERT_FALSE(a.log.empty());
  EXPECT_EQ(a.log.back().step, 60);
  for (std::size_t i = 0; i + 1 < a.log.size(); ++i) EXPECT_EQ(a.log[i].step % 7, 0);
}

TEST(RunTraining, ZeroStepsReturnsInitialParams) {
  const TrainingResult r = tiny_run(5, 0);
  EXPECT_EQ(r.main, std::vector<double>(2 * kActionCount, 0.1));
  EXPECT_TRUE(r.log.empty());
}

TEST(RunTraining, SeedChangesTrajectory) {
  EXPECT_NE(tiny_run(5, 60).main, tiny_run(6, 60).main);
}
