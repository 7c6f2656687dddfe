#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ardq/dynamics.hpp"
#include "ardq/observation.hpp"

namespace ardq {

using ActionValues = std::array<double, kActionCount>;

enum class CoreType { None, Lstm, BiLstm, Gru, BiGru };

std::string_view core_name(CoreType c);
CoreType parse_core(std::string_view name);
inline constexpr std::array<CoreType, 5> kAllCores = {CoreType::None, CoreType::Lstm, CoreType::BiLstm,
                                                      CoreType::Gru, CoreType::BiGru};

struct NetConfig {
  CoreType core = CoreType::Lstm;
  bool attention = true;
  int conv_layers = 2;
  int kernel = 5;
  int filters = 16;
  int units = 16;
  int dense_layers = 3;
  int dense_units = 256;

  void validate() const;
  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

struct InputShape {
  int local_size = 0;   // local crop is local_size x local_size x 5
  int global_size = 0;  // pooled global map is global_size x global_size x 5

  friend bool operator==(const InputShape&, const InputShape&) = default;
};

/// One named array inside the flat parameter vector.
struct ParamEntry {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

class ParamLayout {
 public:
  std::size_t add(std::string name, std::vector<int> shape);
  const std::vector<ParamEntry>& entries() const { return entries_; }
  const ParamEntry& find(std::string_view name) const;
  std::size_t total() const { return total_; }

 private:
  std::vector<ParamEntry> entries_;
  std::size_t total_ = 0;
};

/// Anything the trainer can fit: Q(s, .) and its parameter gradient.
class QModel {
 public:
  virtual ~QModel() = default;
  virtual std::size_t param_count() const = 0;
  virtual ActionValues forward(const Observation& obs, std::span<const double> params) const = 0;
  /// grad += d(dq . Q(obs)) / d params
  virtual void accumulate_gradient(const Observation& obs, std::span<const double> params, const ActionValues& dq,
                                   std::span<double> grad) const = 0;

  /// grad += scale * d(Q(obs)[action] - target)^2 / d params. Returns Q(obs)[action] - target.
  virtual double accumulate_squared_error(const Observation& obs, std::span<const double> params, int action,
                                          double target, double scale, std::span<double> grad) const {
    const ActionValues q = forward(obs, params);
    const double err = q[static_cast<std::size_t>(action)] - target;
    ActionValues dq{};
    dq[static_cast<std::size_t>(action)] = 2.0 * scale * err;
    accumulate_gradient(obs, params, dq, grad);
    return err;
  }
};

/// Intermediate values of one forward pass, reusable across calls.
struct ForwardCache {
  const Observation* obs = nullptr;
  std::vector<std::vector<double>> local_acts;   // post-ReLU output of each local conv layer
  std::vector<std::vector<double>> global_acts;  // same for the global branch
  std::vector<double> tokens;                    // [T][filters]
  // Recurrent scans, forward and (Bi- only) backward direction.
  std::vector<double> gates_f, cell_f, tanh_f, hid_f, rh_f;
  std::vector<double> gates_b, cell_b, tanh_b, hid_b, rh_b;
  std::vector<double> seq;  // [T][core width]
  std::vector<double> att_u, att_scores, att_weights;
  std::vector<double> pooled;
  std::vector<std::vector<double>> dense_in;  // input of each dense layer incl. the output layer
  ActionValues q{};
};

/// Local/global conv encoders -> token sequence -> recurrent core ->
/// attention pooling -> [V, battery] -> dense ReLU stack -> 6 linear outputs.
///
/// Tokens are the spatial positions of the final conv feature maps in
/// row-major order, local map first, then global. With attention off the
/// sequence is reduced by taking the final state (uni-directional cores),
/// the concatenated final states of both directions (Bi- cores), or by
/// flattening all tokens (no core).
class QNetwork final : public QModel {
 public:
  QNetwork(NetConfig config, InputShape input);

  const NetConfig& config() const { return config_; }
  const InputShape& input() const { return input_; }
  const ParamLayout& layout() const { return layout_; }
  std::size_t param_count() const override { return layout_.total(); }

  int token_count() const { return tokens_local_ + tokens_global_; }
  int core_width() const;
  int pooled_width() const;

  /// Fan-in uniform weights, zero biases, forget-gate bias +1.
  std::vector<double> initial_params(std::uint64_t seed) const;

  ActionValues forward(const Observation& obs, std::span<const double> params) const override;
  ActionValues forward(const Observation& obs, std::span<const double> params, ForwardCache& cache) const;

  /// Reverse pass over a cached forward pass. Accumulates into grad and
  /// returns d(dq . Q)/d battery_frac.
  double backward(const ForwardCache& cache, std::span<const double> params, const ActionValues& dq,
                  std::span<double> grad) const;

  void accumulate_gradient(const Observation& obs, std::span<const double> params, const ActionValues& dq,
                           std::span<double> grad) const override;
  double accumulate_squared_error(const Observation& obs, std::span<const double> params, int action, double target,
                                  double scale, std::span<double> grad) const override;

 private:
  struct ConvIds {
    std::vector<std::size_t> weight, bias;
  };
  struct CoreIds {
    std::size_t w = 0, u = 0, b = 0;
  };

  void check_obs(const Observation& obs) const;
  int gate_count() const;
  bool bidirectional() const;

  NetConfig config_;
  InputShape input_;
  ParamLayout layout_;
  int tokens_local_ = 0;
  int tokens_global_ = 0;
  ConvIds local_ids_, global_ids_;
  CoreIds fwd_ids_, bwd_ids_;
  std::size_t att_w_ = 0, att_b_ = 0, att_ctx_ = 0;
  std::vector<std::size_t> dense_w_, dense_b_;  // hidden layers followed by the output layer
  std::vector<int> dense_dims_;                 // input width of every dense layer, then 6
};

}  // namespace ardq
