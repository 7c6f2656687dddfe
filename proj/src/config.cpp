#include "ardq/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ardq {
namespace {

using nlohmann::json;

// Reads the members of one JSON object and complains about leftovers.
class Block {
 public:
  Block(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail("", "expected a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    const json* v = take(key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      fail(key, "has the wrong type (" + std::string(v->type_name()) + ")");
    }
  }

  void get_range(const char* key, IntRange& out) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() || !(*v)[1].is_number_integer())
      fail(key, "must be a two-element integer array [lo, hi]");
    out = {(*v)[0].get<int>(), (*v)[1].get<int>()};
  }

  void get_range(const char* key, RealRange& out) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
      fail(key, "must be a two-element number array [lo, hi]");
    out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
  }

  template <typename F>
  void get_string(const char* key, F&& parse) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_string()) fail(key, "must be a string");
    try {
      parse(v->get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(key, e.what());
    }
  }

  const json* child(const char* key) { return take(key); }
  std::string path_of(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) fail(key, "unknown key");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? (path_.empty() ? "config" : path_) : path_of(key.c_str());
    throw std::invalid_argument(where + ": " + what);
  }

 private:
  const json* take(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_map_gen(Block& b, MapGenSpec& s) {
  b.get("size", s.size);
  b.get("cell_size_m", s.cell_size_m);
  b.get("uav_height_m", s.uav_height_m);
  b.get("landing_zones", s.landing_zones);
  b.get("landing_zone_size", s.landing_zone_size);
  b.get("nfz_count", s.nfz_count);
  b.get("tall_building_count", s.tall_building_count);
  b.get("small_building_count", s.small_building_count);
  b.get("max_block_size", s.max_block_size);
  b.get("seed", s.seed);
  b.finish();
}

void read_scenario(Block& b, ScenarioSpec& s, double& arrival_rate) {
  b.get_string("mission", [&](const std::string& v) { s.mission = parse_mission(v); });
  b.get_range("movement_budget", s.movement_budget);
  b.get_range("cpp_zone_count", s.cpp_zone_count);
  b.get("cpp_target_count", s.cpp_target_count);
  b.get("device_count", s.device_count);
  b.get_range("device_data", s.device_data);
  b.get("arrival_rate", arrival_rate);
  b.finish();
}

void read_channel(Block& b, ChannelParams& c) {
  b.get("tx_power_over_noise_db", c.tx_power_over_noise_db);
  b.get("pathloss_exp_los", c.pathloss_exp_los);
  b.get("pathloss_exp_nlos", c.pathloss_exp_nlos);
  b.get("shadow_sigma_los_db", c.shadow_sigma_los_db);
  b.get("shadow_sigma_nlos_db", c.shadow_sigma_nlos_db);
  b.get("comm_slots_per_mission_slot", c.comm_slots_per_mission_slot);
  b.get("comm_slot_seconds", c.comm_slot_seconds);
  b.finish();
}

void read_obs(Block& b, ObsParams& o) {
  b.get("local_size", o.local_size);
  b.get("global_scale", o.global_scale);
  b.get("data_normalizer", o.data_normalizer);
  b.finish();
}

void read_net(Block& b, NetConfig& n) {
  b.get_string("core", [&](const std::string& v) { n.core = parse_core(v); });
  b.get("attention", n.attention);
  b.get("conv_layers", n.conv_layers);
  b.get("kernel", n.kernel);
  b.get("filters", n.filters);
  b.get("units", n.units);
  b.get("dense_layers", n.dense_layers);
  b.get("dense_units", n.dense_units);
  b.finish();
}

ExplorationKind parse_exploration(const std::string& v) {
  if (v == "softmax") return ExplorationKind::Softmax;
  if (v == "epsilon_greedy") return ExplorationKind::EpsilonGreedy;
  throw std::invalid_argument("unknown exploration '" + v + "' (expected softmax or epsilon_greedy)");
}

OptimizerKind parse_optimizer(const std::string& v) {
  if (v == "sgd") return OptimizerKind::Sgd;
  if (v == "adam") return OptimizerKind::Adam;
  throw std::invalid_argument("unknown optimizer '" + v + "' (expected sgd or adam)");
}

void read_trainer(Block& b, TrainerConfig& t) {
  b.get("gamma", t.gamma);
  b.get("soft_update_eta", t.soft_update_eta);
  b.get("learning_rate", t.learning_rate);
  b.get("batch_size", t.batch_size);
  b.get("buffer_capacity", t.buffer_capacity);
  b.get("total_steps", t.total_steps);
  b.get("update_target_interval", t.update_target_interval);
  b.get("train_interval", t.train_interval);
  b.get_string("optimizer", [&](const std::string& v) { t.optimizer = parse_optimizer(v); });
  b.get("grad_clip", t.grad_clip);
  b.get("adam_beta1", t.adam_beta1);
  b.get("adam_beta2", t.adam_beta2);
  b.get("adam_epsilon", t.adam_epsilon);
  b.get("learning_starts", t.learning_starts);
  b.get("log_interval", t.log_interval);
  b.get("eval_interval", t.eval_interval);
  b.get("eval_episodes", t.eval_episodes);
  if (const json* e = b.child("exploration")) {
    Block x(*e, b.path_of("exploration"));
    x.get_string("kind", [&](const std::string& v) { t.exploration.kind = parse_exploration(v); });
    x.get("temperature", t.exploration.temperature);
    x.get("epsilon_start", t.exploration.epsilon_start);
    x.get("epsilon_end", t.exploration.epsilon_end);
    x.get("epsilon_decay_steps", t.exploration.epsilon_decay_steps);
    x.finish();
  }
  b.finish();
}

void read_rewards(Block& b, RewardWeights& r) {
  b.get("cell", r.cell);
  b.get("data", r.data);
  b.get("safety", r.safety);
  b.get("move", r.move);
  b.get("crash", r.crash);
  b.finish();
}

template <typename F>
void with_block(Block& root, const char* key, F&& read) {
  if (const json* v = root.child(key)) {
    Block b(*v, root.path_of(key));
    read(b);
  }
}

}  // namespace

std::filesystem::path ExperimentConfig::resolved_map_path() const {
  if (map_path.empty()) return {};
  const std::filesystem::path p(map_path);
  return p.is_absolute() ? p : base_dir / p;
}

void ExperimentConfig::validate() const {
  if (eval_episodes < 1) throw std::invalid_argument("eval_episodes must be positive");
  if (arrival_rate < 0.0) throw std::invalid_argument("scenario.arrival_rate must be >= 0");
  scenario.validate();
  channel.validate();
  // the map-size bound is checked once the map is loaded
  obs.validate(std::max(obs.local_size, 1));
  net.validate();
  trainer.validate();
  rewards.validate();
}

ExperimentConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  c.base_dir = base_dir;
  Block root(doc, "");
  root.get("map_path", c.map_path);
  root.get("seed", c.seed);
  root.get("eval_episodes", c.eval_episodes);
  with_block(root, "map_gen", [&](Block& b) { read_map_gen(b, c.map_gen); });
  with_block(root, "scenario", [&](Block& b) { read_scenario(b, c.scenario, c.arrival_rate); });
  with_block(root, "channel", [&](Block& b) { read_channel(b, c.channel); });
  with_block(root, "obs", [&](Block& b) { read_obs(b, c.obs); });
  with_block(root, "net", [&](Block& b) { read_net(b, c.net); });
  with_block(root, "trainer", [&](Block& b) { read_trainer(b, c.trainer); });
  with_block(root, "rewards", [&](Block& b) { read_rewards(b, c.rewards); });
  root.finish();
  c.validate();
  return c;
}

nlohmann::json map_gen_to_json(const MapGenSpec& s) {
  return {{"size", s.size},
          {"cell_size_m", s.cell_size_m},
          {"uav_height_m", s.uav_height_m},
          {"landing_zones", s.landing_zones},
          {"landing_zone_size", s.landing_zone_size},
          {"nfz_count", s.nfz_count},
          {"tall_building_count", s.tall_building_count},
          {"small_building_count", s.small_building_count},
          {"max_block_size", s.max_block_size},
          {"seed", s.seed}};
}

MapGenSpec map_gen_from_json(const nlohmann::json& doc) {
  MapGenSpec s;
  Block b(doc, "");
  read_map_gen(b, s);
  return s;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  const auto& s = c.scenario;
  const auto& t = c.trainer;
  const auto& x = t.exploration;
  json doc;
  doc["map_path"] = c.map_path;
  doc["map_gen"] = map_gen_to_json(c.map_gen);
  doc["seed"] = c.seed;
  doc["eval_episodes"] = c.eval_episodes;
  doc["scenario"] = {{"mission", std::string(mission_name(s.mission))},
                     {"movement_budget", {s.movement_budget.lo, s.movement_budget.hi}},
                     {"cpp_zone_count", {s.cpp_zone_count.lo, s.cpp_zone_count.hi}},
                     {"cpp_target_count", s.cpp_target_count},
                     {"device_count", s.device_count},
                     {"device_data", {s.device_data.lo, s.device_data.hi}},
                     {"arrival_rate", c.arrival_rate}};
  doc["channel"] = {{"tx_power_over_noise_db", c.channel.tx_power_over_noise_db},
                    {"pathloss_exp_los", c.channel.pathloss_exp_los},
                    {"pathloss_exp_nlos", c.channel.pathloss_exp_nlos},
                    {"shadow_sigma_los_db", c.channel.shadow_sigma_los_db},
                    {"shadow_sigma_nlos_db", c.channel.shadow_sigma_nlos_db},
                    {"comm_slots_per_mission_slot", c.channel.comm_slots_per_mission_slot},
                    {"comm_slot_seconds", c.channel.comm_slot_seconds}};
  doc["obs"] = {{"local_size", c.obs.local_size},
                {"global_scale", c.obs.global_scale},
                {"data_normalizer", c.obs.data_normalizer}};
  doc["net"] = {{"core", std::string(core_name(c.net.core))},
                {"attention", c.net.attention},
                {"conv_layers", c.net.conv_layers},
                {"kernel", c.net.kernel},
                {"filters", c.net.filters},
                {"units", c.net.units},
                {"dense_layers", c.net.dense_layers},
                {"dense_units", c.net.dense_units}};
  doc["trainer"] = {
      {"gamma", t.gamma},
      {"soft_update_eta", t.soft_update_eta},
      {"learning_rate", t.learning_rate},
      {"batch_size", t.batch_size},
      {"buffer_capacity", t.buffer_capacity},
      {"total_steps", t.total_steps},
      {"update_target_interval", t.update_target_interval},
      {"train_interval", t.train_interval},
      {"optimizer", t.optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
      {"grad_clip", t.grad_clip},
      {"adam_beta1", t.adam_beta1},
      {"adam_beta2", t.adam_beta2},
      {"adam_epsilon", t.adam_epsilon},
      {"learning_starts", t.learning_starts},
      {"log_interval", t.log_interval},
      {"eval_interval", t.eval_interval},
      {"eval_episodes", t.eval_episodes},
      {"exploration",
       {{"kind", x.kind == ExplorationKind::Softmax ? "softmax" : "epsilon_greedy"},
        {"temperature", x.temperature},
        {"epsilon_start", x.epsilon_start},
        {"epsilon_end", x.epsilon_end},
        {"epsilon_decay_steps", x.epsilon_decay_steps}}}};
  doc["rewards"] = {{"cell", c.rewards.cell},
                    {"data", c.rewards.data},
                    {"safety", c.rewards.safety},
                    {"move", c.rewards.move},
                    {"crash", c.rewards.crash}};
  return doc;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    return config_from_json(doc, path.parent_path());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config file '" + path.string() + "': " + e.what());
  }
}

void apply_overrides(ExperimentConfig& config, const ConfigOverrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.steps) config.trainer.total_steps = *o.steps;
  if (o.episodes) config.eval_episodes = *o.episodes;
  if (o.core) config.net.core = *o.core;
  if (o.attention) config.net.attention = *o.attention;
  config.validate();
}

}  // namespace ardq
