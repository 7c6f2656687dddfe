#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ardq/dynamics.hpp"
#include "ardq/episode.hpp"
#include "ardq/observation.hpp"
#include "ardq/qnet.hpp"
#include "ardq/rng.hpp"

namespace ardq {

struct Transition {
  Observation obs;
  int action = 0;
  double reward = 0.0;
  Observation next_obs;
  ActionMask next_legal;
  bool terminal = false;
};

/// Fixed-capacity FIFO experience memory with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;
  /// Uniform over stored transitions, with replacement.
  std::size_t sample_index(CounterRng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot of the oldest item once full
  std::vector<Transition> items_;
};

enum class ExplorationKind { Softmax, EpsilonGreedy };

struct Exploration {
  ExplorationKind kind = ExplorationKind::Softmax;
  double temperature = 0.1;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_steps = 10000;

  /// Temperature, or epsilon after `step` environment steps (linear decay).
  double value_at(long step) const;
  void validate() const;
};

enum class OptimizerKind { Sgd, Adam };

struct TrainerConfig {
  double gamma = 0.95;
  double soft_update_eta = 0.005;
  double learning_rate = 3e-4;
  int batch_size = 128;
  int buffer_capacity = 10000;
  Exploration exploration;
  long total_steps = 200000;
  int update_target_interval = 1;
  int train_interval = 1;  // environment steps per gradient update
  OptimizerKind optimizer = OptimizerKind::Sgd;
  double grad_clip = 1.0;  // global L2 norm; <= 0 disables
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int learning_starts = 0;  // minimum buffer fill before updates (at least batch_size)
  int log_interval = 1000;
  int eval_interval = 0;  // 0 disables evaluation during training
  int eval_episodes = 20;

  void validate() const;
};

/// Greedy choice: masked argmax, ties to the lowest index.
int greedy_action(const ActionValues& q, const ActionMask& legal);

/// Illegal actions get probability exactly 0. `param` is the softmax
/// temperature or epsilon.
int select_action(const ActionValues& q, const ActionMask& legal, ExplorationKind kind, double param,
                  CounterRng& rng);

/// Softmax policy probabilities over legal actions.
ActionValues softmax_policy(const ActionValues& q, const ActionMask& legal, double temperature);

using QFunction = std::function<ActionValues(const Observation&)>;

/// Double-Q targets: terminal -> r; otherwise r + gamma * Q_target(s', a*) with
/// a* the legal argmax of Q_main(s', .).
std::vector<double> ddqn_targets(std::span<const Transition* const> batch, const QFunction& main,
                                 const QFunction& target, double gamma);

/// Plain SGD or Adam on a flat parameter vector, with optional global-norm clipping.
class Optimizer {
 public:
  Optimizer(const TrainerConfig& config, std::size_t param_count);
  /// Clips `grad` in place, then updates params.
  void step(std::span<double> params, std::span<double> grad);
  long steps() const { return t_; }

 private:
  OptimizerKind kind_;
  double lr_, clip_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

/// Scales grad so its L2 norm is at most max_norm; returns the original norm.
double clip_global_norm(std::span<double> grad, double max_norm);

/// target = (1 - eta) target + eta main. Throws std::invalid_argument on a size mismatch.
void soft_update(std::span<double> target, std::span<const double> main, double eta);

/// One minibatch update of `main`; returns the mean squared TD error before the
/// update. Throws std::runtime_error if the loss is not finite.
double train_step(const ReplayBuffer& buffer, const QModel& model, std::vector<double>& main,
                  const std::vector<double>& target, const TrainerConfig& config, Optimizer& optimizer,
                  CounterRng& rng);

Observation observe_episode(const Episode& episode, const ObsParams& params);

struct TrainingLogRow {
  long step = 0;
  long episode = 0;
  double loss = 0.0;
  double exploration = 0.0;
  std::optional<double> eval_landing_ratio;
  std::optional<double> eval_primary_ratio;
};

std::string training_log_csv(const std::vector<TrainingLogRow>& rows);

struct TrainingResult {
  std::vector<double> main;
  std::vector<double> target;
  std::vector<TrainingLogRow> log;
  long episodes = 0;
};

using EpisodeFactory = std::function<Episode(long episode_index)>;
/// Returns (landing ratio, primary ratio) for a parameter snapshot.
using PeriodicEval = std::function<std::pair<double, double>(std::span<const double> params)>;

/// The DDQN loop: observe, select, step, store, update, soft-update, log.
TrainingResult run_training(const EpisodeFactory& make_episode, const ObsParams& obs_params, const QModel& model,
                            std::vector<double> initial_params, const TrainerConfig& config, std::uint64_t seed,
                            const PeriodicEval& periodic_eval = {});

}  // namespace ardq
