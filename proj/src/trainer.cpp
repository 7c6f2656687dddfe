#include "ardq/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ardq {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("replay buffer: capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("replay buffer: index out of range");
  return items_[(head_ + i) % items_.size()];
}

std::size_t ReplayBuffer::sample_index(CounterRng& rng) const {
  if (items_.empty()) throw std::logic_error("replay buffer: sampling from an empty buffer");
  return static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(items_.size()) - 1));
}

double Exploration::value_at(long step) const {
  if (kind == ExplorationKind::Softmax) return temperature;
  if (epsilon_decay_steps <= 0 || step >= epsilon_decay_steps) return epsilon_end;
  const double frac = static_cast<double>(step) / epsilon_decay_steps;
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

void Exploration::validate() const {
  if (kind == ExplorationKind::Softmax && !(temperature > 0.0))
    throw std::invalid_argument("exploration: softmax temperature must be positive");
  if (kind == ExplorationKind::EpsilonGreedy) {
    if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_end < 0.0 || epsilon_end > 1.0)
      throw std::invalid_argument("exploration: epsilon values must lie in [0, 1]");
    if (epsilon_decay_steps < 0) throw std::invalid_argument("exploration: epsilon_decay_steps must be >= 0");
  }
}

void TrainerConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("trainer: gamma must lie in [0, 1]");
  if (!(soft_update_eta > 0.0 && soft_update_eta <= 1.0))
    throw std::invalid_argument("trainer: soft_update_eta must lie in (0, 1]");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("trainer: learning_rate must be positive");
  if (batch_size < 1) throw std::invalid_argument("trainer: batch_size must be positive");
  if (buffer_capacity < 1) throw std::invalid_argument("trainer: buffer_capacity must be positive");
  if (batch_size > buffer_capacity) throw std::invalid_argument("trainer: batch_size exceeds buffer_capacity");
  if (total_steps < 0) throw std::invalid_argument("trainer: total_steps must be >= 0");
  if (update_target_interval < 1) throw std::invalid_argument("trainer: update_target_interval must be >= 1");
  if (train_interval < 1) throw std::invalid_argument("trainer: train_interval must be >= 1");
  if (learning_starts < 0) throw std::invalid_argument("trainer: learning_starts must be >= 0");
  if (log_interval < 1) throw std::invalid_argument("trainer: log_interval must be >= 1");
  if (eval_interval < 0 || eval_episodes < 1) throw std::invalid_argument("trainer: bad evaluation settings");
  exploration.validate();
}

int greedy_action(const ActionValues& q, const ActionMask& legal) {
  int best = -1;
  for (int a = 0; a < kActionCount; ++a) {
    if (!legal.test(static_cast<std::size_t>(a))) continue;
    if (best < 0 || q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
  }
  if (best < 0) throw std::logic_error("greedy_action: no legal action");
  return best;
}

ActionValues softmax_policy(const ActionValues& q, const ActionMask& legal, double temperature) {
  ActionValues p{};
  double mx = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < kActionCount; ++a)
    if (legal.test(static_cast<std::size_t>(a))) mx = std::max(mx, q[static_cast<std::size_t>(a)]);
  if (!std::isfinite(mx)) throw std::logic_error("softmax_policy: no legal action with a finite value");
  double z = 0.0;
  for (int a = 0; a < kActionCount; ++a) {
    if (!legal.test(static_cast<std::size_t>(a))) continue;
    p[static_cast<std::size_t>(a)] = std::exp((q[static_cast<std::size_t>(a)] - mx) / temperature);
    z += p[static_cast<std::size_t>(a)];
  }
  for (double& v : p) v /= z;
  return p;
}

int select_action(const ActionValues& q, const ActionMask& legal, ExplorationKind kind, double param,
                  CounterRng& rng) {
  if (legal.none()) throw std::logic_error("select_action: no legal action");
  if (kind == ExplorationKind::EpsilonGreedy) {
    const double u = rng.uniform();
    if (u >= param) return greedy_action(q, legal);
    const auto pick = rng.uniform_int(0, static_cast<std::int64_t>(legal.count()) - 1);
    std::int64_t seen = 0;
    for (int a = 0; a < kActionCount; ++a)
      if (legal.test(static_cast<std::size_t>(a)) && seen++ == pick) return a;
    return greedy_action(q, legal);
  }
  const ActionValues p = softmax_policy(q, legal, param);
  const double u = rng.uniform();
  double acc = 0.0;
  int last = -1;
  for (int a = 0; a < kActionCount; ++a) {
    if (!legal.test(static_cast<std::size_t>(a))) continue;
    acc += p[static_cast<std::size_t>(a)];
    last = a;
    if (u < acc) return a;
  }
  return last;  // rounding left u >= sum(p)
}

std::vector<double> ddqn_targets(std::span<const Transition* const> batch, const QFunction& main,
                                 const QFunction& target, double gamma) {
  if (batch.empty()) throw std::invalid_argument("ddqn_targets: empty batch");
  std::vector<double> y;
  y.reserve(batch.size());
  for (const Transition* t : batch) {
    if (t->terminal) {
      y.push_back(t->reward);
      continue;
    }
    const int best = greedy_action(main(t->next_obs), t->next_legal);
    y.push_back(t->reward + gamma * target(t->next_obs)[static_cast<std::size_t>(best)]);
  }
  return y;
}

double clip_global_norm(std::span<double> grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (double& g : grad) g *= s;
  }
  return norm;
}

Optimizer::Optimizer(const TrainerConfig& config, std::size_t param_count)
    : kind_(config.optimizer),
      lr_(config.learning_rate),
      clip_(config.grad_clip),
      beta1_(config.adam_beta1),
      beta2_(config.adam_beta2),
      eps_(config.adam_epsilon) {
  if (kind_ == OptimizerKind::Adam) {
    m_.assign(param_count, 0.0);
    v_.assign(param_count, 0.0);
  }
}

void Optimizer::step(std::span<double> params, std::span<double> grad) {
  if (params.size() != grad.size()) throw std::invalid_argument("optimizer: params/grad size mismatch");
  clip_global_norm(grad, clip_);
  ++t_;
  if (kind_ == OptimizerKind::Sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
    return;
  }
  if (m_.size() != params.size()) throw std::invalid_argument("optimizer: parameter count changed");
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

void soft_update(std::span<double> target, std::span<const double> main, double eta) {
  if (target.size() != main.size())
    throw std::invalid_argument("soft_update: target has " + std::to_string(target.size()) + " entries, main has " +
                                std::to_string(main.size()));
  for (std::size_t i = 0; i < target.size(); ++i) target[i] = (1.0 - eta) * target[i] + eta * main[i];
}

double train_step(const ReplayBuffer& buffer, const QModel& model, std::vector<double>& main,
                  const std::vector<double>& target, const TrainerConfig& config, Optimizer& optimizer,
                  CounterRng& rng) {
  const auto bs = static_cast<std::size_t>(config.batch_size);
  if (buffer.size() < bs) throw std::logic_error("train_step: buffer holds fewer transitions than one batch");
  std::vector<const Transition*> batch(bs);
  for (auto& t : batch) t = &buffer.at(buffer.sample_index(rng));

  const std::span<const double> main_view(main);
  const std::span<const double> target_view(target);
  const QFunction q_main = [&](const Observation& o) { return model.forward(o, main_view); };
  const QFunction q_target = [&](const Observation& o) { return model.forward(o, target_view); };
  const std::vector<double> y = ddqn_targets(batch, q_main, q_target, config.gamma);

  std::vector<double> grad(main.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(bs);
  double loss = 0.0;
  for (std::size_t i = 0; i < bs; ++i) {
    const double err = model.accumulate_squared_error(batch[i]->obs, main_view, batch[i]->action, y[i], scale, grad);
    loss += err * err * scale;
  }
  if (!std::isfinite(loss)) throw std::runtime_error("train_step: loss is not finite (training diverged)");
  optimizer.step(main, grad);
  return loss;
}

Observation observe_episode(const Episode& episode, const ObsParams& params) {
  return observe(episode.map(), episode.mission().target_layer, episode.mission().mission == MissionType::Dh,
                 episode.uav(), episode.movement_budget(), params);
}

std::string training_log_csv(const std::vector<TrainingLogRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "step,episode,loss,epsilon_or_temp,eval_landing_ratio,eval_primary_ratio\n";
  for (const auto& r : rows) {
    out << r.step << ',' << r.episode << ',' << r.loss << ',' << r.exploration << ',';
    if (r.eval_landing_ratio) out << *r.eval_landing_ratio;
    out << ',';
    if (r.eval_primary_ratio) out << *r.eval_primary_ratio;
    out << '\n';
  }
  return out.str();
}

TrainingResult run_training(const EpisodeFactory& make_episode, const ObsParams& obs_params, const QModel& model,
                            std::vector<double> initial_params, const TrainerConfig& config, std::uint64_t seed,
                            const PeriodicEval& periodic_eval) {
  config.validate();
  if (initial_params.size() != model.param_count())
    throw std::invalid_argument("run_training: initial parameters do not match the model");

  TrainingResult result;
  result.main = std::move(initial_params);
  result.target = result.main;
  if (config.total_steps == 0) return result;

  ReplayBuffer buffer(static_cast<std::size_t>(config.buffer_capacity));
  Optimizer optimizer(config, result.main.size());
  const CounterRng root(seed);
  CounterRng act_rng = root.split(11);
  CounterRng batch_rng = root.split(12);
  const std::size_t warmup =
      static_cast<std::size_t>(std::max(config.batch_size, config.learning_starts));

  long step = 0;
  long episode = 0;
  double loss_sum = 0.0;
  long loss_count = 0;
  while (step < config.total_steps) {
    Episode env = make_episode(episode);
    Observation obs = observe_episode(env, obs_params);
    while (!env.done() && step < config.total_steps) {
      const double explore = config.exploration.value_at(step);
      const ActionMask legal = env.legal();
      const ActionValues q = model.forward(obs, result.main);
      const int a = select_action(q, legal, config.exploration.kind, explore, act_rng);
      const StepResult res = env.step(action_at(a));
      Observation next = observe_episode(env, obs_params);
      const ActionMask next_legal = env.legal();
      buffer.push({obs, a, res.reward, next, next_legal, res.done});
      obs = std::move(next);
      ++step;

      if (buffer.size() >= warmup && step % config.train_interval == 0) {
        loss_sum += train_step(buffer, model, result.main, result.target, config, optimizer, batch_rng);
        ++loss_count;
      }
      if (step % config.update_target_interval == 0) soft_update(result.target, result.main, config.soft_update_eta);

      const bool eval_now = config.eval_interval > 0 && periodic_eval && step % config.eval_interval == 0;
      if (step % config.log_interval == 0 || step == config.total_steps || eval_now) {
        TrainingLogRow row;
        row.step = step;
        row.episode = episode;
        row.loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
        row.exploration = explore;
        if (eval_now) {
          const auto [landing, primary] = periodic_eval(result.main);
          row.eval_landing_ratio = landing;
          row.eval_primary_ratio = primary;
        }
        result.log.push_back(row);
        loss_sum = 0.0;
        loss_count = 0;
      }
    }
    ++episode;
  }
  result.episodes = episode;
  return result;
}

}  // namespace ardq
