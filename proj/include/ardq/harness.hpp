#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ardq/checkpoint.hpp"
#include "ardq/config.hpp"
#include "ardq/episode.hpp"
#include "ardq/qnet.hpp"
#include "ardq/trainer.hpp"

namespace ardq {

/// Loads map_path, or generates a map from map_gen when no path is set.
std::shared_ptr<const EnvironmentMap> load_experiment_map(const ExperimentConfig& config);

InputShape input_shape(const ExperimentConfig& config, const EnvironmentMap& map);

/// Seed streams derived from the master seed.
enum class SeedStream : std::uint64_t { Training = 1, Evaluation = 2, PeriodicEval = 3, Init = 4, Trainer = 5 };
std::uint64_t derived_seed(std::uint64_t master, SeedStream stream, std::uint64_t index = 0);

/// Fresh scenario + launch for one episode, channel RNG from the same seed.
Episode make_episode(std::shared_ptr<const EnvironmentMap> map, const ExperimentConfig& config,
                     std::uint64_t episode_seed);

struct EvalRow {
  int episode = 0;
  std::uint64_t seed = 0;
  MissionType mission = MissionType::Cpp;
  int steps_used = 0;
  bool landed = false;
  double coverage_ratio = 0.0;
  double collection_ratio = 0.0;
};

struct EvalReport {
  MissionType mission = MissionType::Cpp;
  std::vector<EvalRow> rows;
  double landing_ratio = 0.0;
  double coverage_ratio_mean = 0.0;
  double collection_ratio_mean = 0.0;

  int episodes() const { return static_cast<int>(rows.size()); }
};

/// Chooses an action index for the current state. Must return a legal action.
using Policy = std::function<int(const Episode&, const Observation&)>;

/// Masked argmax of the network's Q-values.
Policy greedy_policy(const QModel& model, std::span<const double> params);

/// Runs `episodes` episodes with seeds derived from (seed, stream).
EvalReport evaluate_policy(std::shared_ptr<const EnvironmentMap> map, const ExperimentConfig& config,
                           const Policy& policy, int episodes, std::uint64_t seed,
                           SeedStream stream = SeedStream::Evaluation);

/// Greedy evaluation over config.eval_episodes episodes.
EvalReport evaluate(std::shared_ptr<const EnvironmentMap> map, const ExperimentConfig& config, const QModel& model,
                    std::span<const double> params);

std::string eval_report_csv(const EvalReport& report);
nlohmann::json eval_report_json(const EvalReport& report);

/// The headline ratio for the mission: coverage (CPP) or collection (DH).
double primary_ratio(const EvalReport& report);

struct TrainOutcome {
  Checkpoint checkpoint;
  std::vector<TrainingLogRow> log;
  long episodes = 0;
};

/// Builds the network, trains it and packs the final main parameters into a
/// checkpoint. Progress lines go to `progress` when non-null.
TrainOutcome train_experiment(const ExperimentConfig& config, std::ostream* progress = nullptr);

/// Rebuilds the network for `config` and checks the checkpoint fits it.
/// Throws std::runtime_error naming the first mismatching setting or array.
QNetwork network_for_checkpoint(const ExperimentConfig& config, const EnvironmentMap& map, const Checkpoint& ckpt);

struct ComparisonRow {
  MissionType mission = MissionType::Cpp;
  CoreType core = CoreType::Lstm;
  bool attention = true;
  std::size_t param_count = 0;
  EvalReport report;
};

/// Trains and evaluates every core type with otherwise identical settings.
/// Checkpoints and reports land in out_dir when it is non-empty.
std::vector<ComparisonRow> compare_cores(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                         std::ostream* progress = nullptr);

/// CSV: mission,core,attention,params,episodes,landing_ratio,coverage_ratio,collection_ratio
std::string comparison_csv(const std::vector<ComparisonRow>& rows);
/// Aligned plain-text table of the same numbers.
std::string comparison_table(const std::vector<ComparisonRow>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ardq
