#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ardq/checks/oracles.hpp"
#include "ardq/checks/selfcheck.hpp"
#include "ardq/qnet.hpp"
#include "ardq/rng.hpp"

using namespace ardq;

namespace {

Observation random_obs(const InputShape& in, std::uint64_t seed) {
  CounterRng rng(seed);
  Observation obs{Tensor3(in.local_size, in.local_size, kObsChannels),
                  Tensor3(in.global_size, in.global_size, kObsChannels), rng.uniform(0.1, 0.9)};
  for (int i = 0; i < in.local_size; ++i)
    for (int j = 0; j < in.local_size; ++j)
      for (int k = 0; k < kObsChannels; ++k) obs.local(i, j, k) = rng.uniform();
  for (int i = 0; i < in.global_size; ++i)
    for (int j = 0; j < in.global_size; ++j)
      for (int k = 0; k < kObsChannels; ++k) obs.global(i, j, k) = rng.uniform();
  return obs;
}

std::vector<double> random_params(const QNetwork& net, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> p(net.param_count());
  for (double& v : p) v = rng.uniform(-0.6, 0.6);
  return p;
}

}  // namespace

TEST(CoreNames, RoundTrip) {
  for (CoreType c : kAllCores) EXPECT_EQ(parse_core(core_name(c)), c);
  EXPECT_THROW(parse_core("transformer"), std::invalid_argument);
}

TEST(NetConfig, RejectsEvenKernel) {
  NetConfig c;
  c.kernel = 4;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Layout, OffsetsAreContiguous) {
  const QNetwork net(check::small_net(CoreType::BiLstm, true), check::small_input());
  std::size_t next = 0;
  for (const ParamEntry& e : net.layout().entries()) {
    EXPECT_EQ(e.offset, next) << e.name;
    std::size_t n = 1;
    for (int d : e.shape) n *= static_cast<std::size_t>(d);
    EXPECT_EQ(e.size, n) << e.name;
    next += e.size;
  }
  EXPECT_EQ(next, net.param_count());
}

TEST(Layout, TokenCountIsBothFeatureMaps) {
  const InputShape in = check::small_input();
  const QNetwork net(check::small_net(CoreType::Lstm, true), in);
  EXPECT_EQ(net.token_count(), in.local_size * in.local_size + in.global_size * in.global_size);
}

TEST(Layout, CoreWidths) {
  const NetConfig base = check::small_net(CoreType::Lstm, true);
  const InputShape in = check::small_input();
  EXPECT_EQ(QNetwork(check::small_net(CoreType::None, true), in).core_width(), base.filters);
  EXPECT_EQ(QNetwork(check::small_net(CoreType::Lstm, true), in).core_width(), base.units);
  EXPECT_EQ(QNetwork(check::small_net(CoreType::Gru, true), in).core_width(), base.units);
  EXPECT_EQ(QNetwork(check::small_net(CoreType::BiLstm, true), in).core_width(), 2 * base.units);
  EXPECT_EQ(QNetwork(check::small_net(CoreType::BiGru, true), in).core_width(), 2 * base.units);
}

TEST(Layout, AttentionOffReduction) {
  const InputShape in = check::small_input();
  const QNetwork flat(check::small_net(CoreType::None, false), in);
  EXPECT_EQ(flat.pooled_width(), flat.token_count() * flat.config().filters);
  const QNetwork bi(check::small_net(CoreType::BiGru, false), in);
  EXPECT_EQ(bi.pooled_width(), 2 * bi.config().units);
  const QNetwork uni(check::small_net(CoreType::Lstm, false), in);
  EXPECT_EQ(uni.pooled_width(), uni.config().units);
}

TEST(Init, DeterministicPerSeed) {
  const QNetwork net(check::small_net(CoreType::Gru, true), check::small_input());
  EXPECT_EQ(net.initial_params(3), net.initial_params(3));
  EXPECT_NE(net.initial_params(3), net.initial_params(4));
}

TEST(Init, BiasesZeroExceptForgetGate) {
  const QNetwork net(check::small_net(CoreType::Lstm, true), check::small_input());
  const std::vector<double> p = net.initial_params(9);
  const int n = net.config().units;
  for (const ParamEntry& e : net.layout().entries()) {
    if (e.shape.size() != 1) continue;
    if (e.name == "attention.context") continue;
    const bool lstm_bias = e.name.starts_with("lstm.");
    for (std::size_t i = 0; i < e.size; ++i) {
      const double want = lstm_bias && i < static_cast<std::size_t>(n) ? 1.0 : 0.0;
      EXPECT_EQ(p[e.offset + i], want) << e.name << "[" << i << "]";
    }
  }
}

TEST(Forward, FiniteAndDeterministic) {
  for (CoreType c : kAllCores) {
    for (bool att : {false, true}) {
      const QNetwork net(check::small_net(c, att), check::small_input());
      const auto p = net.initial_params(1);
      const Observation obs = random_obs(net.input(), 2);
      const ActionValues a = net.forward(obs, p);
      const ActionValues b = net.forward(obs, p);
      EXPECT_EQ(a, b);
      for (double q : a) EXPECT_TRUE(std::isfinite(q));
    }
  }
}

TEST(Forward, RejectsWrongShape) {
  const QNetwork net(check::small_net(CoreType::Lstm, true), check::small_input());
  Observation obs = random_obs(net.input(), 2);
  obs.local = Tensor3(7, 7, kObsChannels);
  EXPECT_THROW(net.forward(obs, net.initial_params(1)), std::invalid_argument);
}

TEST(Gradient, MatchesFiniteDifferencesForEveryCore) {
  for (CoreType c : kAllCores) {
    for (bool att : {false, true}) {
      const QNetwork net(check::small_net(c, att), check::small_input());
      const auto p = random_params(net, 21);
      const Observation obs = random_obs(net.input(), 22);
      const ActionValues dq{0.3, -1.1, 0.7, 0.2, -0.4, 1.5};
      const oracle::GradientCheck r = oracle::check_gradients(net, obs, p, dq);
      EXPECT_LT(r.max_rel_error, 1e-4) << core_name(c) << " attention=" << att << " worst index " << r.worst_index;
    }
  }
}

TEST(Gradient, SquaredErrorMatchesGeneric) {
  const QNetwork net(check::small_net(CoreType::BiLstm, true), check::small_input());
  const auto p = random_params(net, 5);
  const Observation obs = random_obs(net.input(), 6);
  std::vector<double> fast(p.size(), 0.0), slow(p.size(), 0.0);
  const double e1 = net.accumulate_squared_error(obs, p, 2, 0.25, 0.5, fast);
  const double e2 = net.QModel::accumulate_squared_error(obs, p, 2, 0.25, 0.5, slow);
  EXPECT_DOUBLE_EQ(e1, e2);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(fast[i], slow[i], 1e-12 * (1.0 + std::abs(slow[i])));
}

TEST(Gradient, Accumulates) {
  const QNetwork net(check::small_net(CoreType::Gru, false), check::small_input());
  const auto p = random_params(net, 7);
  const Observation obs = random_obs(net.input(), 8);
  const ActionValues dq{1, 0, 0, 0, 0, 0};
  std::vector<double> once(p.size(), 0.0), twice(p.size(), 0.0);
  net.accumulate_gradient(obs, p, dq, once);
  net.accumulate_gradient(obs, p, dq, twice);
  net.accumulate_gradient(obs, p, dq, twice);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(twice[i], 2.0 * once[i], 1e-12 * (1.0 + std::abs(once[i])));
}
