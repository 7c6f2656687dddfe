#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ardq/harness.hpp"
#include "ardq/rng.hpp"

using namespace ardq;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c = load_config(std::filesystem::path(ARDQ_SOURCE_DIR) / "configs" / "smoke.json");
  c.net.filters = 2;
  c.net.units = 3;
  c.net.dense_units = 8;
  c.trainer.total_steps = 120;
  c.trainer.batch_size = 8;
  c.trainer.learning_starts = 16;
  c.trainer.log_interval = 50;
  c.eval_episodes = 4;
  return c;
}

int land_or_hover(const Episode& ep, const Observation&) {
  return ep.legal().test(static_cast<std::size_t>(Action::Land)) ? static_cast<int>(Action::Land) : 0;
}

int first_legal_move(const Episode& ep, const Observation&) {
  for (int a = 1; a < 5; ++a)
    if (ep.legal().test(static_cast<std::size_t>(a))) return a;
  return 0;
}

}  // namespace

TEST(Seeds, DerivedFromSplitStreams) {
  const std::uint64_t want = CounterRng(77).split(2).split(5).next_u64();
  EXPECT_EQ(derived_seed(77, SeedStream::Evaluation, 5), want);
  EXPECT_NE(derived_seed(77, SeedStream::Training, 5), want);
}

TEST(Evaluate, ImmediateLandingLandsEveryEpisode) {
  const ExperimentConfig c = tiny_config();
  const auto map = load_experiment_map(c);
  const EvalReport r = evaluate_policy(map, c, land_or_hover, 10, c.seed);
  EXPECT_EQ(r.episodes(), 10);
  EXPECT_EQ(r.landing_ratio, 1.0);
  for (const EvalRow& row : r.rows) {
    EXPECT_EQ(row.steps_used, 1);
    EXPECT_GE(row.coverage_ratio, 0.0);
    EXPECT_LE(row.coverage_ratio, 1.0);
  }
}

TEST(Evaluate, NeverLandingMeansNoLandings) {
  const ExperimentConfig c = tiny_config();
  const auto map = load_experiment_map(c);
  const EvalReport r = evaluate_policy(map, c, first_legal_move, 5, c.seed);
  EXPECT_EQ(r.landing_ratio, 0.0);
  double mean = 0.0;
  for (const EvalRow& row : r.rows) {
    EXPECT_EQ(row.steps_used, 20);
    mean += row.coverage_ratio / 5.0;
  }
  EXPECT_NEAR(r.coverage_ratio_mean, mean, 1e-12);
}

TEST(Evaluate, RejectsIllegalPolicy) {
  const ExperimentConfig c = tiny_config();
  const auto map = load_experiment_map(c);
  const Policy bad = [](const Episode&, const Observation&) { return 17; };
  EXPECT_THROW(evaluate_policy(map, c, bad, 1, c.seed), std::logic_error);
}

TEST(Evaluate, SeedsFollowTheEvaluationStream) {
  const ExperimentConfig c = tiny_config();
  const auto map = load_experiment_map(c);
  const EvalReport r = evaluate_policy(map, c, land_or_hover, 3, 9);
  for (const EvalRow& row : r.rows)
    EXPECT_EQ(row.seed, derived_seed(9, SeedStream::Evaluation, static_cast<std::uint64_t>(row.episode)));
}

TEST(Report, CsvLeavesOtherMissionColumnEmpty) {
  EvalReport r;
  r.mission = MissionType::Cpp;
  r.rows = {{0, 42, MissionType::Cpp, 7, true, 0.5, 0.0}};
  EXPECT_EQ(eval_report_csv(r),
            "episode,seed,mission,steps_used,landed,coverage_ratio,collection_ratio\n"
            "0,42,cpp,7,1,0.500000,\n");
  r.mission = MissionType::Dh;
  r.rows = {{3, 1, MissionType::Dh, 9, false, 0.0, 0.25}};
  EXPECT_EQ(eval_report_csv(r),
            "episode,seed,mission,steps_used,landed,coverage_ratio,collection_ratio\n"
            "3,1,dh,9,0,,0.250000\n");
}

TEST(Report, JsonNullsTheOtherMean) {
  EvalReport r;
  r.mission = MissionType::Dh;
  r.collection_ratio_mean = 0.4;
  const auto doc = eval_report_json(r);
  EXPECT_TRUE(doc["coverage_ratio_mean"].is_null());
  EXPECT_EQ(doc["collection_ratio_mean"], 0.4);
  EXPECT_EQ(primary_ratio(r), 0.4);
}

TEST(Train, ReproducibleCheckpoint) {
  const ExperimentConfig c = tiny_config();
  const TrainOutcome a = train_experiment(c);
  const TrainOutcome b = train_experiment(c);
  EXPECT_EQ(encode_checkpoint(a.checkpoint), encode_checkpoint(b.checkpoint));
  EXPECT_EQ(training_log_csv(a.log), training_log_csv(b.log));
  EXPECT_EQ(a.checkpoint.seed, c.seed);
  EXPECT_EQ(a.checkpoint.config, config_to_json(c));
}

TEST(Train, PeriodicEvalFillsLogColumns) {
  ExperimentConfig c = tiny_config();
  c.trainer.eval_interval = 60;
  c.trainer.eval_episodes = 2;
  const TrainOutcome t = train_experiment(c);
  int evaluated = 0;
  for (const auto& row : t.log)
    if (row.eval_landing_ratio) {
      ++evaluated;
      EXPECT_EQ(row.step % 60, 0);
      EXPECT_GE(*row.eval_primary_ratio, 0.0);
      EXPECT_LE(*row.eval_primary_ratio, 1.0);
    }
  EXPECT_EQ(evaluated, 2);
}

TEST(Checkpoint, MismatchedCoreIsNamed) {
  const ExperimentConfig c = tiny_config();
  const TrainOutcome t = train_experiment(c);
  ExperimentConfig other = c;
  other.net.core = CoreType::Gru;
  const auto map = load_experiment_map(c);
  try {
    network_for_checkpoint(other, *map, t.checkpoint);
    FAIL() << "expected a mismatch";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("net.core"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(network_for_checkpoint(c, *map, t.checkpoint));
}

TEST(Compare, OneRowPerCoreWithRatiosInRange) {
  ExperimentConfig c = tiny_config();
  c.trainer.total_steps = 40;
  const auto rows = compare_cores(c, {});
  ASSERT_EQ(rows.size(), kAllCores.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].core, kAllCores[i]);
    EXPECT_GE(rows[i].report.landing_ratio, 0.0);
    EXPECT_LE(rows[i].report.landing_ratio, 1.0);
    EXPECT_GE(rows[i].report.coverage_ratio_mean, 0.0);
    EXPECT_LE(rows[i].report.coverage_ratio_mean, 1.0);
  }
  const std::string csv = comparison_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "mission,core,attention,params,episodes,landing_ratio,coverage_ratio,collection_ratio");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_EQ(comparison_csv(compare_cores(c, {})), csv);
}
