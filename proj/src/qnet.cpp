#include "ardq/qnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ardq/layers.hpp"
#include "ardq/rng.hpp"

namespace ardq {

std::string_view core_name(CoreType c) {
  switch (c) {
    case CoreType::None: return "none";
    case CoreType::Lstm: return "lstm";
    case CoreType::BiLstm: return "bilstm";
    case CoreType::Gru: return "gru";
    case CoreType::BiGru: return "bigru";
  }
  return "?";
}

CoreType parse_core(std::string_view name) {
  for (CoreType c : kAllCores)
    if (core_name(c) == name) return c;
  throw std::invalid_argument("unknown core '" + std::string(name) + "' (expected none|lstm|bilstm|gru|bigru)");
}

void NetConfig::validate() const {
  if (conv_layers < 1) throw std::invalid_argument("net: conv_layers must be >= 1");
  if (kernel < 1 || kernel % 2 == 0) throw std::invalid_argument("net: kernel must be odd and positive");
  if (filters < 1 || units < 1) throw std::invalid_argument("net: filters and units must be positive");
  if (dense_layers < 0 || dense_units < 1) throw std::invalid_argument("net: bad dense head shape");
}

std::size_t ParamLayout::add(std::string name, std::vector<int> shape) {
  std::size_t size = 1;
  for (int d : shape) {
    if (d < 1) throw std::invalid_argument("param layout: nonpositive dimension in " + name);
    size *= static_cast<std::size_t>(d);
  }
  entries_.push_back({std::move(name), std::move(shape), total_, size});
  total_ += size;
  return entries_.back().offset;
}

const ParamEntry& ParamLayout::find(std::string_view name) const {
  for (const ParamEntry& e : entries_)
    if (e.name == name) return e;
  throw std::out_of_range("param layout: no array named '" + std::string(name) + "'");
}

bool QNetwork::bidirectional() const { return config_.core == CoreType::BiLstm || config_.core == CoreType::BiGru; }

int QNetwork::gate_count() const {
  switch (config_.core) {
    case CoreType::Lstm:
    case CoreType::BiLstm: return kLstmGates;
    case CoreType::Gru:
    case CoreType::BiGru: return kGruGates;
    case CoreType::None: return 0;
  }
  return 0;
}

int QNetwork::core_width() const {
  if (config_.core == CoreType::None) return config_.filters;
  return bidirectional() ? 2 * config_.units : config_.units;
}

int QNetwork::pooled_width() const {
  if (!config_.attention && config_.core == CoreType::None) return token_count() * config_.filters;
  return core_width();
}

QNetwork::QNetwork(NetConfig config, InputShape input) : config_(config), input_(input) {
  config_.validate();
  if (input_.local_size < 1 || input_.global_size < 1) throw std::invalid_argument("net: empty input maps");
  tokens_local_ = input_.local_size * input_.local_size;
  tokens_global_ = input_.global_size * input_.global_size;

  const int k = config_.kernel;
  const int f = config_.filters;
  for (int branch = 0; branch < 2; ++branch) {
    ConvIds& ids = branch == 0 ? local_ids_ : global_ids_;
    const std::string prefix = branch == 0 ? "local" : "global";
    for (int l = 0; l < config_.conv_layers; ++l) {
      const int cin = l == 0 ? kObsChannels : f;
      const std::string name = prefix + ".conv" + std::to_string(l);
      ids.weight.push_back(layout_.add(name + ".weight", {k, k, cin, f}));
      ids.bias.push_back(layout_.add(name + ".bias", {f}));
    }
  }

  if (config_.core != CoreType::None) {
    const int n = config_.units;
    const int gates = gate_count() * n;
    const std::string kind = (config_.core == CoreType::Lstm || config_.core == CoreType::BiLstm) ? "lstm" : "gru";
    for (int dir = 0; dir < (bidirectional() ? 2 : 1); ++dir) {
      CoreIds& ids = dir == 0 ? fwd_ids_ : bwd_ids_;
      const std::string name = kind + (dir == 0 ? ".fwd" : ".bwd");
      ids.w = layout_.add(name + ".W", {f, gates});
      ids.u = layout_.add(name + ".U", {n, gates});
      ids.b = layout_.add(name + ".b", {gates});
    }
  }

  if (config_.attention) {
    att_w_ = layout_.add("attention.W", {core_width(), config_.units});
    att_b_ = layout_.add("attention.b", {config_.units});
    att_ctx_ = layout_.add("attention.context", {config_.units});
  }

  dense_dims_.push_back(pooled_width() + 1);
  for (int l = 0; l < config_.dense_layers; ++l) {
    const std::string name = "dense" + std::to_string(l);
    dense_w_.push_back(layout_.add(name + ".weight", {dense_dims_.back(), config_.dense_units}));
    dense_b_.push_back(layout_.add(name + ".bias", {config_.dense_units}));
    dense_dims_.push_back(config_.dense_units);
  }
  dense_w_.push_back(layout_.add("output.weight", {dense_dims_.back(), kActionCount}));
  dense_b_.push_back(layout_.add("output.bias", {kActionCount}));
  dense_dims_.push_back(kActionCount);
}

std::vector<double> QNetwork::initial_params(std::uint64_t seed) const {
  std::vector<double> p(layout_.total(), 0.0);
  CounterRng rng(seed);
  for (const ParamEntry& e : layout_.entries()) {
    const bool is_bias = e.shape.size() == 1 && e.name.find("context") == std::string::npos;
    if (is_bias) continue;
    // Fan-in is every dimension but the last (the length, for the context vector).
    std::size_t fan_in = e.shape.size() == 1 ? static_cast<std::size_t>(e.shape[0]) : 1;
    for (std::size_t d = 0; d + 1 < e.shape.size(); ++d) fan_in *= static_cast<std::size_t>(e.shape[d]);
    const double limit = std::sqrt(3.0 / static_cast<double>(fan_in));
    CounterRng stream = rng.split(e.offset);
    for (std::size_t i = 0; i < e.size; ++i) p[e.offset + i] = stream.uniform(-limit, limit);
  }
  if (config_.core == CoreType::Lstm || config_.core == CoreType::BiLstm) {
    const int n = config_.units;
    for (int dir = 0; dir < (bidirectional() ? 2 : 1); ++dir) {
      const std::size_t b = dir == 0 ? fwd_ids_.b : bwd_ids_.b;
      for (int j = 0; j < n; ++j) p[b + static_cast<std::size_t>(j)] = 1.0;  // forget gate block comes first
    }
  }
  return p;
}

void QNetwork::check_obs(const Observation& obs) const {
  auto check = [](const Tensor3& t, int size, const char* what) {
    if (t.height() != size || t.width() != size || t.channels() != kObsChannels)
      throw std::invalid_argument(std::string("q_forward: ") + what + " map is " + std::to_string(t.height()) + "x" +
                                  std::to_string(t.width()) + "x" + std::to_string(t.channels()) + ", network expects " +
                                  std::to_string(size) + "x" + std::to_string(size) + "x" +
                                  std::to_string(kObsChannels));
  };
  check(obs.local, input_.local_size, "local");
  check(obs.global, input_.global_size, "global");
}

ActionValues QNetwork::forward(const Observation& obs, std::span<const double> params) const {
  thread_local ForwardCache cache;
  return forward(obs, params, cache);
}

ActionValues QNetwork::forward(const Observation& obs, std::span<const double> params, ForwardCache& cache) const {
  if (params.size() != layout_.total())
    throw std::invalid_argument("q_forward: parameter vector has " + std::to_string(params.size()) +
                                " entries, network needs " + std::to_string(layout_.total()));
  check_obs(obs);
  const double* P = params.data();
  const int f = config_.filters;
  cache.obs = &obs;

  // Conv encoders.
  auto encode = [&](const Tensor3& input, const ConvIds& ids, std::vector<std::vector<double>>& acts) {
    const int size = input.height();
    acts.resize(static_cast<std::size_t>(config_.conv_layers));
    const double* in = input.data();
    for (int l = 0; l < config_.conv_layers; ++l) {
      ConvShape s{size, size, l == 0 ? kObsChannels : f, f, config_.kernel};
      auto& out = acts[static_cast<std::size_t>(l)];
      out.resize(static_cast<std::size_t>(size) * size * f);
      conv2d_relu_forward(s, in, P + ids.weight[static_cast<std::size_t>(l)], P + ids.bias[static_cast<std::size_t>(l)],
                          out.data());
      in = out.data();
    }
  };
  encode(obs.local, local_ids_, cache.local_acts);
  encode(obs.global, global_ids_, cache.global_acts);

  const int T = token_count();
  cache.tokens.resize(static_cast<std::size_t>(T) * f);
  std::copy(cache.local_acts.back().begin(), cache.local_acts.back().end(), cache.tokens.begin());
  std::copy(cache.global_acts.back().begin(), cache.global_acts.back().end(),
            cache.tokens.begin() + static_cast<std::ptrdiff_t>(tokens_local_) * f);

  // Recurrent core.
  const int d = core_width();
  if (config_.core == CoreType::None) {
    cache.seq = cache.tokens;
  } else {
    const int n = config_.units;
    const int gw = gate_count() * n;
    const bool lstm = gate_count() == kLstmGates;
    cache.seq.assign(static_cast<std::size_t>(T) * d, 0.0);
    std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
    auto scan = [&](const CoreIds& ids, bool reverse, std::vector<double>& gates, std::vector<double>& cell,
                    std::vector<double>& tanh_c, std::vector<double>& hid, std::vector<double>& rh, int out_offset) {
      const RecurrentView view{P + ids.w, P + ids.u, P + ids.b, f, n};
      gates.resize(static_cast<std::size_t>(T) * gw);
      hid.resize(static_cast<std::size_t>(T) * n);
      if (lstm) {
        cell.resize(static_cast<std::size_t>(T) * n);
        tanh_c.resize(static_cast<std::size_t>(T) * n);
      } else {
        rh.resize(static_cast<std::size_t>(T) * n);
      }
      // Step s processes token t; caches are indexed by step.
      for (int s = 0; s < T; ++s) {
        const int t = reverse ? T - 1 - s : s;
        const double* x = cache.tokens.data() + static_cast<std::size_t>(t) * f;
        const double* h_prev = s == 0 ? zeros.data() : hid.data() + static_cast<std::size_t>(s - 1) * n;
        double* h = hid.data() + static_cast<std::size_t>(s) * n;
        if (lstm) {
          const double* c_prev = s == 0 ? zeros.data() : cell.data() + static_cast<std::size_t>(s - 1) * n;
          lstm_cell_forward(view, x, h_prev, c_prev, gates.data() + static_cast<std::size_t>(s) * gw,
                            cell.data() + static_cast<std::size_t>(s) * n, tanh_c.data() + static_cast<std::size_t>(s) * n,
                            h);
        } else {
          gru_cell_forward(view, x, h_prev, gates.data() + static_cast<std::size_t>(s) * gw,
                           rh.data() + static_cast<std::size_t>(s) * n, h);
        }
        std::copy(h, h + n, cache.seq.begin() + static_cast<std::ptrdiff_t>(t) * d + out_offset);
      }
    };
    scan(fwd_ids_, false, cache.gates_f, cache.cell_f, cache.tanh_f, cache.hid_f, cache.rh_f, 0);
    if (bidirectional()) scan(bwd_ids_, true, cache.gates_b, cache.cell_b, cache.tanh_b, cache.hid_b, cache.rh_b, n);
  }

  // Sequence reduction.
  const int pw = pooled_width();
  cache.pooled.assign(static_cast<std::size_t>(pw), 0.0);
  if (config_.attention) {
    const AttentionView view{P + att_w_, P + att_b_, P + att_ctx_, d, config_.units};
    cache.att_u.resize(static_cast<std::size_t>(T) * config_.units);
    cache.att_scores.resize(static_cast<std::size_t>(T));
    cache.att_weights.resize(static_cast<std::size_t>(T));
    attention_forward(view, T, cache.seq.data(), cache.att_u.data(), cache.att_scores.data(), cache.att_weights.data(),
                      cache.pooled.data());
  } else if (config_.core == CoreType::None) {
    cache.pooled = cache.seq;
  } else {
    // Final state of the forward scan sits at the last token; for Bi- cores the
    // backward scan ends at token 0.
    const int n = config_.units;
    std::copy_n(cache.seq.begin() + static_cast<std::ptrdiff_t>(T - 1) * d, n, cache.pooled.begin());
    if (bidirectional()) std::copy_n(cache.seq.begin() + n, n, cache.pooled.begin() + n);
  }

  // Dense head.
  const std::size_t layers = dense_w_.size();
  cache.dense_in.resize(layers);
  auto& first = cache.dense_in[0];
  first.resize(static_cast<std::size_t>(pw) + 1);
  std::copy(cache.pooled.begin(), cache.pooled.end(), first.begin());
  first[static_cast<std::size_t>(pw)] = obs.battery_frac;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = dense_dims_[l];
    const int out = dense_dims_[l + 1];
    if (l + 1 < layers) {
      auto& next = cache.dense_in[l + 1];
      next.resize(static_cast<std::size_t>(out));
      dense_forward(in, out, cache.dense_in[l].data(), P + dense_w_[l], P + dense_b_[l], next.data());
      for (double& v : next) v = v > 0.0 ? v : 0.0;
    } else {
      dense_forward(in, out, cache.dense_in[l].data(), P + dense_w_[l], P + dense_b_[l], cache.q.data());
    }
  }
  return cache.q;
}

double QNetwork::backward(const ForwardCache& cache, std::span<const double> params, const ActionValues& dq,
                          std::span<double> grad) const {
  if (params.size() != layout_.total() || grad.size() != layout_.total())
    throw std::invalid_argument("q_backward: parameter/gradient size mismatch");
  if (!cache.obs) throw std::logic_error("q_backward: no cached forward pass");
  const double* P = params.data();
  double* G = grad.data();
  const int f = config_.filters;
  const int T = token_count();
  const int d = core_width();
  const int pw = pooled_width();

  // Dense head, output layer first.
  const std::size_t layers = dense_w_.size();
  std::vector<double> dy(dq.begin(), dq.end());
  for (std::size_t l = layers; l-- > 0;) {
    const int in = dense_dims_[l];
    const int out = dense_dims_[l + 1];
    std::vector<double> dx(static_cast<std::size_t>(in), 0.0);
    dense_backward(in, out, cache.dense_in[l].data(), P + dense_w_[l], dy.data(), G + dense_w_[l], G + dense_b_[l],
                   dx.data());
    if (l > 0) {
      // dense_in[l] is post-ReLU output of layer l-1.
      for (int i = 0; i < in; ++i)
        if (!(cache.dense_in[l][static_cast<std::size_t>(i)] > 0.0)) dx[static_cast<std::size_t>(i)] = 0.0;
    }
    dy = std::move(dx);
  }
  const double dbattery = dy[static_cast<std::size_t>(pw)];

  // Sequence reduction.
  std::vector<double> dseq(static_cast<std::size_t>(T) * d, 0.0);
  if (config_.attention) {
    const AttentionView view{P + att_w_, P + att_b_, P + att_ctx_, d, config_.units};
    const AttentionGrad g{G + att_w_, G + att_b_, G + att_ctx_};
    std::vector<double> scratch(static_cast<std::size_t>(config_.units));
    attention_backward(view, g, T, cache.seq.data(), cache.att_u.data(), cache.att_weights.data(), dy.data(),
                       dseq.data(), scratch.data());
  } else if (config_.core == CoreType::None) {
    std::copy_n(dy.begin(), pw, dseq.begin());
  } else {
    const int n = config_.units;
    for (int k = 0; k < n; ++k) dseq[static_cast<std::size_t>(T - 1) * d + k] += dy[static_cast<std::size_t>(k)];
    if (bidirectional())
      for (int k = 0; k < n; ++k) dseq[static_cast<std::size_t>(n + k)] += dy[static_cast<std::size_t>(n + k)];
  }

  // Recurrent core back to the token sequence.
  std::vector<double> dtokens;
  if (config_.core == CoreType::None) {
    dtokens = std::move(dseq);
  } else {
    dtokens.assign(static_cast<std::size_t>(T) * f, 0.0);
    const int n = config_.units;
    const int gw = gate_count() * n;
    const bool lstm = gate_count() == kLstmGates;
    std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
    std::vector<double> scratch(static_cast<std::size_t>(gw + n));
    auto unscan = [&](const CoreIds& ids, bool reverse, const std::vector<double>& gates, const std::vector<double>& cell,
                      const std::vector<double>& tanh_c, const std::vector<double>& hid, const std::vector<double>& rh,
                      int out_offset) {
      const RecurrentView view{P + ids.w, P + ids.u, P + ids.b, f, n};
      const RecurrentGrad g{G + ids.w, G + ids.u, G + ids.b};
      std::vector<double> dh_next(static_cast<std::size_t>(n), 0.0);  // from step s+1 into h_s
      std::vector<double> dc(static_cast<std::size_t>(n), 0.0);
      std::vector<double> dh(static_cast<std::size_t>(n));
      for (int s = T - 1; s >= 0; --s) {
        const int t = reverse ? T - 1 - s : s;
        for (int k = 0; k < n; ++k)
          dh[static_cast<std::size_t>(k)] =
              dh_next[static_cast<std::size_t>(k)] + dseq[static_cast<std::size_t>(t) * d + out_offset + k];
        std::fill(dh_next.begin(), dh_next.end(), 0.0);
        const double* x = cache.tokens.data() + static_cast<std::size_t>(t) * f;
        const double* h_prev = s == 0 ? zeros.data() : hid.data() + static_cast<std::size_t>(s - 1) * n;
        double* dx = dtokens.data() + static_cast<std::size_t>(t) * f;
        double* dh_prev = s == 0 ? nullptr : dh_next.data();
        if (lstm) {
          const double* c_prev = s == 0 ? zeros.data() : cell.data() + static_cast<std::size_t>(s - 1) * n;
          lstm_cell_backward(view, g, x, h_prev, c_prev, gates.data() + static_cast<std::size_t>(s) * gw,
                             tanh_c.data() + static_cast<std::size_t>(s) * n, dh.data(), dc.data(), dx, dh_prev,
                             scratch.data());
        } else {
          gru_cell_backward(view, g, x, h_prev, gates.data() + static_cast<std::size_t>(s) * gw,
                            rh.data() + static_cast<std::size_t>(s) * n, dh.data(), dx, dh_prev, scratch.data());
        }
      }
    };
    unscan(fwd_ids_, false, cache.gates_f, cache.cell_f, cache.tanh_f, cache.hid_f, cache.rh_f, 0);
    if (bidirectional())
      unscan(bwd_ids_, true, cache.gates_b, cache.cell_b, cache.tanh_b, cache.hid_b, cache.rh_b, n);
  }

  // Conv encoders.
  auto decode = [&](const Tensor3& input, const ConvIds& ids, const std::vector<std::vector<double>>& acts,
                    const double* dtok) {
    const int size = input.height();
    const std::size_t cells = static_cast<std::size_t>(size) * size;
    std::vector<double> dout(dtok, dtok + cells * f);
    for (int l = config_.conv_layers - 1; l >= 0; --l) {
      const auto ul = static_cast<std::size_t>(l);
      const ConvShape s{size, size, l == 0 ? kObsChannels : f, f, config_.kernel};
      const double* in = l == 0 ? input.data() : acts[ul - 1].data();
      std::vector<double> din;
      if (l > 0) din.assign(cells * f, 0.0);
      conv2d_relu_backward(s, in, acts[ul].data(), P + ids.weight[ul], dout.data(), G + ids.weight[ul], G + ids.bias[ul],
                           l > 0 ? din.data() : nullptr);
      dout = std::move(din);
    }
  };
  decode(cache.obs->local, local_ids_, cache.local_acts, dtokens.data());
  decode(cache.obs->global, global_ids_, cache.global_acts, dtokens.data() + static_cast<std::size_t>(tokens_local_) * f);
  return dbattery;
}

void QNetwork::accumulate_gradient(const Observation& obs, std::span<const double> params, const ActionValues& dq,
                                   std::span<double> grad) const {
  thread_local ForwardCache cache;
  forward(obs, params, cache);
  backward(cache, params, dq, grad);
}

double QNetwork::accumulate_squared_error(const Observation& obs, std::span<const double> params, int action,
                                          double target, double scale, std::span<double> grad) const {
  thread_local ForwardCache cache;
  const ActionValues q = forward(obs, params, cache);
  const double err = q[static_cast<std::size_t>(action)] - target;
  ActionValues dq{};
  dq[static_cast<std::size_t>(action)] = 2.0 * scale * err;
  backward(cache, params, dq, grad);
  return err;
}

}  // namespace ardq
