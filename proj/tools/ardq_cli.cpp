#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ardq/checks/selfcheck.hpp"
#include "ardq/config.hpp"
#include "ardq/harness.hpp"
#include "ardq/render.hpp"

namespace fs = std::filesystem;
using namespace ardq;

namespace {

struct OverrideFlags {
  std::optional<std::uint64_t> seed;
  std::optional<long> steps;
  std::optional<int> episodes;
  std::optional<std::string> core;
  std::optional<std::string> attention;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Master seed");
    cmd->add_option("--steps", steps, "Training steps")->check(CLI::NonNegativeNumber);
    cmd->add_option("--episodes", episodes, "Evaluation episodes")->check(CLI::PositiveNumber);
    cmd->add_option("--core", core, "Recurrent core")->check(CLI::IsMember({"none", "lstm", "bilstm", "gru", "bigru"}));
    cmd->add_option("--attention", attention, "Attention pooling")->check(CLI::IsMember({"on", "off"}));
  }

  ExperimentConfig load(const std::string& path) const {
    ExperimentConfig config = load_config(path);
    ConfigOverrides o;
    o.seed = seed;
    o.steps = steps;
    o.episodes = episodes;
    if (core) o.core = parse_core(*core);
    if (attention) o.attention = *attention == "on";
    apply_overrides(config, o);
    return config;
  }
};

void write_eval(const fs::path& dir, const EvalReport& report) {
  fs::create_directories(dir);
  write_text_file(dir / "eval_report.csv", eval_report_csv(report));
  write_text_file(dir / "eval_report.json", eval_report_json(report).dump(2) + "\n");
}

void print_summary(const EvalReport& r) {
  std::cout << "episodes " << r.episodes() << "  landing " << r.landing_ratio;
  if (r.mission == MissionType::Cpp)
    std::cout << "  coverage " << r.coverage_ratio_mean << "\n";
  else
    std::cout << "  collection " << r.collection_ratio_mean << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV coverage / data-harvesting DDQN agent"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_path, out_path, spec_path;
  OverrideFlags flags;

  auto* train = app.add_subcommand("train", "Train a Q-network; writes checkpoint.ardq and train_log.csv");
  train->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out_path, "Output directory")->default_val("out");
  flags.add_to(train);

  auto* eval = app.add_subcommand("eval", "Greedy Monte Carlo evaluation; writes eval_report.csv/.json");
  eval->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  eval->add_option("checkpoint", checkpoint_path, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", out_path, "Output directory")->default_val("out");
  flags.add_to(eval);

  int render_episode = 0;
  int render_scale = 8;
  auto* render = app.add_subcommand("render", "Render one greedy evaluation episode as a PPM image");
  render->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  render->add_option("checkpoint", checkpoint_path, "Checkpoint file")->required()->check(CLI::ExistingFile);
  render->add_option("image", out_path, "Output .ppm path")->required();
  render->add_option("--episode", render_episode, "Evaluation episode index")->check(CLI::NonNegativeNumber);
  render->add_option("--scale", render_scale, "Pixels per cell")->check(CLI::PositiveNumber);
  flags.add_to(render);

  auto* genmap = app.add_subcommand("gen-map", "Generate a random map from a JSON spec");
  genmap->add_option("spec", spec_path, "Map generator spec (JSON)")->required()->check(CLI::ExistingFile);
  genmap->add_option("--out", out_path, "Output map file (default: stdout)");

  std::vector<std::string> suites;
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the oracle suites");
  selfcheck->add_option("--suite", suites, "Only these suites")
      ->check(CLI::IsMember({"geometry", "centering", "gradients", "ddqn", "fuzz"}));

  std::vector<std::string> compare_configs;
  auto* compare = app.add_subcommand("compare", "Train and evaluate all five cores per config; writes comparison.csv");
  compare->add_option("configs", compare_configs, "Experiment configs (JSON), e.g. one per mission")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--out", out_path, "Output directory")->default_val("compare");
  flags.add_to(compare);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      const ExperimentConfig config = flags.load(config_path);
      const TrainOutcome result = train_experiment(config, &std::cerr);
      fs::create_directories(out_path);
      write_checkpoint((fs::path(out_path) / "checkpoint.ardq").string(), result.checkpoint);
      write_text_file(fs::path(out_path) / "train_log.csv", training_log_csv(result.log));
      std::cout << "wrote " << (fs::path(out_path) / "checkpoint.ardq").string() << "\n";
    } else if (*eval) {
      const ExperimentConfig config = flags.load(config_path);
      const auto map = load_experiment_map(config);
      const Checkpoint ckpt = read_checkpoint(checkpoint_path);
      const QNetwork net = network_for_checkpoint(config, *map, ckpt);
      const EvalReport report = evaluate(map, config, net, ckpt.params);
      write_eval(out_path, report);
      print_summary(report);
    } else if (*render) {
      const ExperimentConfig config = flags.load(config_path);
      const auto map = load_experiment_map(config);
      const Checkpoint ckpt = read_checkpoint(checkpoint_path);
      const QNetwork net = network_for_checkpoint(config, *map, ckpt);
      Episode ep = make_episode(map, config,
                                derived_seed(config.seed, SeedStream::Evaluation, static_cast<std::uint64_t>(render_episode)));
      const Policy policy = greedy_policy(net, ckpt.params);
      while (!ep.done()) ep.step(action_at(policy(ep, observe_episode(ep, config.obs))));
      const Image img = render_trajectory(*map, ep.mission(), ep.path(), render_scale);
      write_text_file(out_path, img.ppm());
      const Metrics m = ep.metrics();
      std::cout << "steps " << ep.steps_taken() << "  landed " << (m.landed ? "yes" : "no") << "\n";
    } else if (*genmap) {
      std::ifstream in(spec_path);
      const MapGenSpec spec = map_gen_from_json(nlohmann::json::parse(in));
      const std::string text = save_map(generate_map(spec));
      if (out_path.empty())
        std::cout << text;
      else
        write_text_file(out_path, text);
    } else if (*selfcheck) {
      using namespace ardq::check;
      auto wanted = [&](const char* name) {
        return suites.empty() || std::find(suites.begin(), suites.end(), name) != suites.end();
      };
      bool ok = true;
      auto report = [&](const SuiteResult& r) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.seconds << " s): " << r.detail << "\n";
        ok = ok && r.passed;
      };
      if (wanted("geometry")) report(geometry_suite());
      if (wanted("centering")) report(centering_suite());
      if (wanted("gradients")) report(gradient_suite());
      if (wanted("ddqn")) report(ddqn_suite());
      if (wanted("fuzz")) report(fuzz_suite());
      return ok ? 0 : 1;
    } else if (*compare) {
      std::vector<ComparisonRow> rows;
      for (const std::string& path : compare_configs) {
        const ExperimentConfig config = flags.load(path);
        auto part = compare_cores(config, fs::path(out_path) / fs::path(path).stem(), &std::cerr);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      write_text_file(fs::path(out_path) / "comparison.csv", comparison_csv(rows));
      std::cout << comparison_table(rows);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
