#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "ardq/dynamics.hpp"
#include "ardq/observation.hpp"
#include "ardq/qnet.hpp"
#include "ardq/radio.hpp"
#include "ardq/scenario.hpp"
#include "ardq/trainer.hpp"
#include "ardq/world.hpp"

namespace ardq {

/// Everything a train/eval/render run needs. A missing block or field keeps
/// its default; unknown keys are rejected.
struct ExperimentConfig {
  std::string map_path;  // as written; empty means "generate from map_gen"
  std::filesystem::path base_dir;  // directory map_path is relative to (not serialized)
  MapGenSpec map_gen;
  std::uint64_t seed = 1;
  int eval_episodes = 1000;
  ScenarioSpec scenario;
  double arrival_rate = 0.0;  // DH Poisson arrivals per device and step
  ChannelParams channel;
  ObsParams obs;
  NetConfig net;
  TrainerConfig trainer;
  RewardWeights rewards;

  std::filesystem::path resolved_map_path() const;
  void validate() const;
};

/// Throws std::invalid_argument with the offending key path, e.g. "trainer.gama: unknown key".
ExperimentConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> steps;
  std::optional<int> episodes;
  std::optional<CoreType> core;
  std::optional<bool> attention;
};

void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

MapGenSpec map_gen_from_json(const nlohmann::json& doc);
nlohmann::json map_gen_to_json(const MapGenSpec& spec);

}  // namespace ardq
