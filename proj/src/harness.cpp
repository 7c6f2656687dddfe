#include "ardq/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ardq {

std::shared_ptr<const EnvironmentMap> load_experiment_map(const ExperimentConfig& config) {
  if (config.map_path.empty()) return std::make_shared<const EnvironmentMap>(generate_map(config.map_gen));
  return std::make_shared<const EnvironmentMap>(load_map_file(config.resolved_map_path().string()));
}

InputShape input_shape(const ExperimentConfig& config, const EnvironmentMap& map) {
  config.obs.validate(map.size());
  return {config.obs.local_size, config.obs.global_size(map.size())};
}

std::uint64_t derived_seed(std::uint64_t master, SeedStream stream, std::uint64_t index) {
  return CounterRng(master).split(static_cast<std::uint64_t>(stream)).split(index).next_u64();
}

Episode make_episode(std::shared_ptr<const EnvironmentMap> map, const ExperimentConfig& config,
                     std::uint64_t episode_seed) {
  ScenarioSpec spec = config.scenario;
  spec.rng_seed = episode_seed;
  SimConfig sim{config.channel, config.rewards, config.arrival_rate};
  return Episode::from_spec(std::move(map), spec, sim);
}

Policy greedy_policy(const QModel& model, std::span<const double> params) {
  return [&model, params](const Episode& ep, const Observation& obs) {
    return greedy_action(model.forward(obs, params), ep.legal());
  };
}

EvalReport evaluate_policy(std::shared_ptr<const EnvironmentMap> map, const ExperimentConfig& config,
                           const Policy& policy, int episodes, std::uint64_t seed, SeedStream stream) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episode count must be positive");
  EvalReport report;
  report.mission = config.scenario.mission;
  int landed = 0;
  double coverage = 0.0;
  double collection = 0.0;
  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t s = derived_seed(seed, stream, static_cast<std::uint64_t>(e));
    Episode ep = make_episode(map, config, s);
    while (!ep.done()) {
      const int a = policy(ep, observe_episode(ep, config.obs));
      if (a < 0 || a >= kActionCount || !ep.legal().test(static_cast<std::size_t>(a)))
        throw std::logic_error("evaluate: policy returned an illegal action");
      ep.step(action_at(a));
    }
    const Metrics m = ep.metrics();
    report.rows.push_back({e, s, report.mission, ep.steps_taken(), m.landed, m.coverage_ratio, m.collection_ratio});
    landed += m.landed ? 1 : 0;
    coverage += m.coverage_ratio;
    collection += m.collection_ratio;
  }
  report.landing_ratio = static_cast<double>(landed) / episodes;
  report.coverage_ratio_mean = coverage / episodes;
  report.collection_ratio_mean = collection / episodes;
  return report;
}

EvalReport evaluate(std::shared_ptr<const EnvironmentMap> map, const ExperimentConfig& config, const QModel& model,
                    std::span<const double> params) {
  return evaluate_policy(std::move(map), config, greedy_policy(model, params), config.eval_episodes, config.seed);
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string eval_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "episode,seed,mission,steps_used,landed,coverage_ratio,collection_ratio\n";
  for (const EvalRow& r : report.rows) {
    const bool cpp = r.mission == MissionType::Cpp;
    out << r.episode << ',' << r.seed << ',' << mission_name(r.mission) << ',' << r.steps_used << ','
        << (r.landed ? 1 : 0) << ',' << (cpp ? fmt(r.coverage_ratio) : "") << ','
        << (cpp ? "" : fmt(r.collection_ratio)) << '\n';
  }
  return out.str();
}

nlohmann::json eval_report_json(const EvalReport& report) {
  const bool cpp = report.mission == MissionType::Cpp;
  nlohmann::json rows = nlohmann::json::array();
  for (const EvalRow& r : report.rows) {
    nlohmann::json row = {{"episode", r.episode}, {"seed", r.seed}, {"steps_used", r.steps_used},
                          {"landed", r.landed}};
    if (cpp)
      row["coverage_ratio"] = r.coverage_ratio;
    else
      row["collection_ratio"] = r.collection_ratio;
    rows.push_back(row);
  }
  nlohmann::json doc = {{"mission", std::string(mission_name(report.mission))},
                        {"episodes", report.episodes()},
                        {"landing_ratio", report.landing_ratio}};
  doc["coverage_ratio_mean"] = cpp ? nlohmann::json(report.coverage_ratio_mean) : nlohmann::json(nullptr);
  doc["collection_ratio_mean"] = cpp ? nlohmann::json(nullptr) : nlohmann::json(report.collection_ratio_mean);
  doc["rows"] = rows;
  return doc;
}

double primary_ratio(const EvalReport& report) {
  return report.mission == MissionType::Cpp ? report.coverage_ratio_mean : report.collection_ratio_mean;
}

TrainOutcome train_experiment(const ExperimentConfig& config, std::ostream* progress) {
  config.validate();
  const auto map = load_experiment_map(config);
  const QNetwork net(config.net, input_shape(config, *map));
  if (progress)
    *progress << "network: core=" << core_name(config.net.core) << " attention=" << (config.net.attention ? "on" : "off")
              << " parameters=" << net.param_count() << "\n";

  std::vector<double> init = net.initial_params(derived_seed(config.seed, SeedStream::Init));
  const EpisodeFactory factory = [&](long e) {
    return make_episode(map, config, derived_seed(config.seed, SeedStream::Training, static_cast<std::uint64_t>(e)));
  };
  PeriodicEval periodic;
  if (config.trainer.eval_interval > 0) {
    periodic = [&](std::span<const double> params) {
      const EvalReport r = evaluate_policy(map, config, greedy_policy(net, params), config.trainer.eval_episodes,
                                           config.seed, SeedStream::PeriodicEval);
      return std::pair{r.landing_ratio, primary_ratio(r)};
    };
  }
  TrainingResult result = run_training(factory, config.obs, net, std::move(init), config.trainer,
                                       derived_seed(config.seed, SeedStream::Trainer), periodic);
  if (progress && !result.log.empty()) {
    const TrainingLogRow& last = result.log.back();
    *progress << "trained " << last.step << " steps over " << result.episodes << " episodes, final loss "
              << last.loss << "\n";
  }

  TrainOutcome out;
  out.checkpoint.config = config_to_json(config);
  out.checkpoint.seed = config.seed;
  out.checkpoint.arrays = net.layout().entries();
  out.checkpoint.params = std::move(result.main);
  out.log = std::move(result.log);
  out.episodes = result.episodes;
  return out;
}

QNetwork network_for_checkpoint(const ExperimentConfig& config, const EnvironmentMap& map, const Checkpoint& ckpt) {
  const nlohmann::json want = config_to_json(config);
  for (const char* block : {"net", "obs"}) {
    if (!ckpt.config.contains(block)) continue;
    for (const auto& [key, value] : want[block].items()) {
      const auto it = ckpt.config[block].find(key);
      if (it != ckpt.config[block].end() && *it != value)
        throw std::runtime_error("checkpoint was trained with " + std::string(block) + "." + key + " = " +
                                 it->dump() + " but the config sets " + value.dump());
    }
  }
  QNetwork net(config.net, input_shape(config, map));
  check_layout_matches(net.layout(), ckpt);
  return net;
}

std::vector<ComparisonRow> compare_cores(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                         std::ostream* progress) {
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  const auto map = load_experiment_map(config);
  std::vector<ComparisonRow> rows;
  for (CoreType core : kAllCores) {
    ExperimentConfig c = config;
    c.net.core = core;
    if (progress) *progress << "== " << mission_name(c.scenario.mission) << " / " << core_name(core) << "\n";
    TrainOutcome trained = train_experiment(c, progress);
    const QNetwork net(c.net, input_shape(c, *map));
    ComparisonRow row;
    row.mission = c.scenario.mission;
    row.core = core;
    row.attention = c.net.attention;
    row.param_count = net.param_count();
    row.report = evaluate(map, c, net, trained.checkpoint.params);
    if (!out_dir.empty()) {
      const std::string stem = std::string(core_name(core));
      write_checkpoint((out_dir / (stem + ".ardq")).string(), trained.checkpoint);
      write_text_file(out_dir / (stem + "_train_log.csv"), training_log_csv(trained.log));
      write_text_file(out_dir / (stem + "_eval.csv"), eval_report_csv(row.report));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "mission,core,attention,params,episodes,landing_ratio,coverage_ratio,collection_ratio\n";
  for (const auto& r : rows) {
    const bool cpp = r.report.mission == MissionType::Cpp;
    out << mission_name(r.mission) << ',' << core_name(r.core) << ',' << (r.attention ? "on" : "off") << ',' << r.param_count << ','
        << r.report.episodes() << ',' << fmt(r.report.landing_ratio) << ','
        << (cpp ? fmt(r.report.coverage_ratio_mean) : "") << ','
        << (cpp ? "" : fmt(r.report.collection_ratio_mean)) << '\n';
  }
  return out.str();
}

std::string comparison_table(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-7s %-8s %-9s %9s %8s %9s %10s\n", "mission", "core", "attention", "params",
                "landing", "coverage", "collection");
  out << line;
  for (const auto& r : rows) {
    const bool cpp = r.report.mission == MissionType::Cpp;
    std::snprintf(line, sizeof line, "%-7s %-8s %-9s %9zu %8.3f %9s %10s\n",
                  std::string(mission_name(r.mission)).c_str(), std::string(core_name(r.core)).c_str(),
                  r.attention ? "on" : "off", r.param_count, r.report.landing_ratio,
                  cpp ? fmt(r.report.coverage_ratio_mean).substr(0, 5).c_str() : "-",
                  cpp ? "-" : fmt(r.report.collection_ratio_mean).substr(0, 5).c_str());
    out << line;
  }
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace ardq
