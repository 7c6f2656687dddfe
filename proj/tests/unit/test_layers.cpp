#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ardq/checks/oracles.hpp"
#include "ardq/layers.hpp"
#include "ardq/rng.hpp"

using namespace ardq;

TEST(Conv, IdentityKernelPassesNonNegativeInput) {
  const int n = 5;
  std::vector<double> in(n * n), w(9, 0.0), b{0.0}, out(n * n);
  for (int i = 0; i < n * n; ++i) in[static_cast<std::size_t>(i)] = 0.1 * i;
  w[4] = 1.0;
  conv2d_relu_forward({n, n, 1, 1, 3}, in.data(), w.data(), b.data(), out.data());
  EXPECT_EQ(out, in);
}

TEST(Conv, ZeroInputZeroBiasGivesZero) {
  std::vector<double> in(4 * 4 * 3, 0.0), w(3 * 3 * 3 * 2, 0.7), b(2, 0.0), out(4 * 4 * 2, 5.0);
  conv2d_relu_forward({4, 4, 3, 2, 3}, in.data(), w.data(), b.data(), out.data());
  for (double v : out) EXPECT_EQ(v, 0.0);
}

TEST(Conv, MatchesNestedLoopReference) {
  CounterRng rng(5);
  const int n = 6, cin = 2, cout = 3, k = 3;
  std::vector<double> in(n * n * cin), w(k * k * cin * cout), b(cout), out(n * n * cout);
  for (double& v : in) v = rng.uniform(-1, 1);
  for (double& v : w) v = rng.uniform(-1, 1);
  for (double& v : b) v = rng.uniform(-0.5, 0.5);
  conv2d_relu_forward({n, n, cin, cout, k}, in.data(), w.data(), b.data(), out.data());
  const std::vector<double> want = oracle::conv2d_relu(n, cin, cout, k, in, w, b);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], want[i], 1e-12);
}

TEST(Dense, AffineMap) {
  const std::vector<double> x{1.0, 2.0}, w{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, b{0.5, 0.0, -1.0};
  std::vector<double> y(3);
  dense_forward(2, 3, x.data(), w.data(), b.data(), y.data());
  EXPECT_EQ(y[0], 0.5 + 1.0 * 1.0 + 2.0 * 4.0);
  EXPECT_EQ(y[1], 2.0 + 2.0 * 5.0);
  EXPECT_EQ(y[2], -1.0 + 3.0 + 12.0);
}

namespace {

struct Packed {
  std::vector<double> w, u, b;
  RecurrentView view(int in, int n) const { return {w.data(), u.data(), b.data(), in, n}; }
};

Packed zeros(int in, int n, int gates) {
  return {std::vector<double>(static_cast<std::size_t>(in * gates * n), 0.0),
          std::vector<double>(static_cast<std::size_t>(n * gates * n), 0.0),
          std::vector<double>(static_cast<std::size_t>(gates * n), 0.0)};
}

}  // namespace

TEST(Lstm, ZeroParamsHandEvaluation) {
  const Packed p = zeros(2, 3, kLstmGates);
  const std::vector<double> x{0.3, -0.7}, h{0.2, 0.1, -0.4}, c{1.0, -2.0, 0.5};
  const LstmState s = lstm_step(x, h, c, p.view(2, 3));
  for (int k = 0; k < 3; ++k) {
    const double ck = 0.5 * c[static_cast<std::size_t>(k)];
    EXPECT_DOUBLE_EQ(s.c[static_cast<std::size_t>(k)], ck);
    EXPECT_DOUBLE_EQ(s.h[static_cast<std::size_t>(k)], 0.5 * std::tanh(ck));
  }
}

TEST(Lstm, ZeroCellZeroParamsGivesZeroHidden) {
  const Packed p = zeros(1, 2, kLstmGates);
  const std::vector<double> x{0.9}, h{0.5, 0.5}, c{0.0, 0.0};
  const LstmState s = lstm_step(x, h, c, p.view(1, 2));
  EXPECT_EQ(s.h, (std::vector<double>{0.0, 0.0}));
}

TEST(Lstm, SaturatedGatesWriteCandidate) {
  Packed p = zeros(1, 1, kLstmGates);
  p.b = {-1e3, 1e3, 0.0, 0.0};  // forget closed, input open
  p.w = {0.0, 0.0, 0.0, 0.8};   // candidate = tanh(0.8 x)
  const std::vector<double> x{1.0}, h{0.0}, c{5.0};
  const LstmState s = lstm_step(x, h, c, p.view(1, 1));
  EXPECT_NEAR(s.c[0], std::tanh(0.8), 1e-12);
}

TEST(Gru, ZeroParamsHalvesHidden) {
  const Packed p = zeros(2, 3, kGruGates);
  const std::vector<double> x{0.3, -0.7}, h{0.2, 0.1, -0.4};
  const std::vector<double> out = gru_step(x, h, p.view(2, 3));
  for (int k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(out[static_cast<std::size_t>(k)], 0.5 * h[static_cast<std::size_t>(k)]);
}

TEST(Gru, ZeroHiddenZeroParams) {
  const Packed p = zeros(1, 2, kGruGates);
  const std::vector<double> x{0.4}, h{0.0, 0.0};
  EXPECT_EQ(gru_step(x, h, p.view(1, 2)), (std::vector<double>{0.0, 0.0}));
}

TEST(Gru, ClosedUpdateGateCopiesState) {
  Packed p = zeros(1, 2, kGruGates);
  p.b = {-1e3, -1e3, 0.0, 0.0, 0.0, 0.0};
  p.w = {0.0, 0.0, 0.0, 0.0, 3.0, -3.0};
  const std::vector<double> x{1.0}, h{0.25, -0.75};
  const std::vector<double> out = gru_step(x, h, p.view(1, 2));
  EXPECT_NEAR(out[0], 0.25, 1e-12);
  EXPECT_NEAR(out[1], -0.75, 1e-12);
}

TEST(Recurrent, TiedBidirectionalScanIsReversalSymmetricOnPalindromes) {
  CounterRng rng(8);
  const int in = 2, n = 3;
  Packed p = zeros(in, n, kLstmGates);
  for (double& v : p.w) v = rng.uniform(-0.5, 0.5);
  for (double& v : p.u) v = rng.uniform(-0.5, 0.5);
  for (double& v : p.b) v = rng.uniform(-0.5, 0.5);
  const std::vector<std::vector<double>> seq{{0.1, 0.2}, {0.7, -0.3}, {0.5, 0.5}, {0.7, -0.3}, {0.1, 0.2}};
  const int t = static_cast<int>(seq.size());
  auto scan = [&](bool reverse) {
    std::vector<std::vector<double>> hs(static_cast<std::size_t>(t));
    std::vector<double> h(n, 0.0), c(n, 0.0);
    for (int s = 0; s < t; ++s) {
      const int k = reverse ? t - 1 - s : s;
      const LstmState st = lstm_step(seq[static_cast<std::size_t>(k)], h, c, p.view(in, n));
      h = st.h;
      c = st.c;
      hs[static_cast<std::size_t>(k)] = h;
    }
    return hs;
  };
  const auto fwd = scan(false);
  const auto bwd = scan(true);
  for (int k = 0; k < t; ++k)
    for (int j = 0; j < n; ++j)
      EXPECT_NEAR(fwd[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)],
                  bwd[static_cast<std::size_t>(t - 1 - k)][static_cast<std::size_t>(j)], 1e-15);
}

namespace {

struct Att {
  std::vector<double> w, b, ctx;
  AttentionView view(int d, int n) const { return {w.data(), b.data(), ctx.data(), d, n}; }
};

Att random_attention(int d, int n, std::uint64_t seed) {
  CounterRng rng(seed);
  Att a{std::vector<double>(static_cast<std::size_t>(d * n)), std::vector<double>(static_cast<std::size_t>(n)),
        std::vector<double>(static_cast<std::size_t>(n))};
  for (double& v : a.w) v = rng.uniform(-1, 1);
  for (double& v : a.b) v = rng.uniform(-1, 1);
  for (double& v : a.ctx) v = rng.uniform(-1, 1);
  return a;
}

}  // namespace

TEST(Attention, SingleTokenPassesThrough) {
  const Att a = random_attention(3, 4, 1);
  const std::vector<double> seq{0.2, -0.4, 0.9};
  std::vector<double> u(4), scores(1), weights(1), pooled(3);
  attention_forward(a.view(3, 4), 1, seq.data(), u.data(), scores.data(), weights.data(), pooled.data());
  EXPECT_EQ(weights[0], 1.0);
  EXPECT_EQ(pooled, seq);
}

TEST(Attention, IdenticalTokensShareWeight) {
  const Att a = random_attention(2, 3, 2);
  const std::vector<double> seq{0.3, 0.6, 0.3, 0.6};
  std::vector<double> u(6), scores(2), weights(2), pooled(2);
  attention_forward(a.view(2, 3), 2, seq.data(), u.data(), scores.data(), weights.data(), pooled.data());
  EXPECT_EQ(weights[0], 0.5);
  EXPECT_EQ(weights[1], 0.5);
  EXPECT_DOUBLE_EQ(pooled[0], 0.3);
  EXPECT_DOUBLE_EQ(pooled[1], 0.6);
}

TEST(Attention, WeightsArePositiveAndSumToOne) {
  const Att a = random_attention(4, 5, 3);
  CounterRng rng(4);
  const int t = 9;
  std::vector<double> seq(t * 4);
  for (double& v : seq) v = rng.uniform(-2, 2);
  std::vector<double> u(t * 5), scores(t), weights(t), pooled(4);
  attention_forward(a.view(4, 5), t, seq.data(), u.data(), scores.data(), weights.data(), pooled.data());
  double sum = 0.0;
  for (double w : weights) {
    EXPECT_GT(w, 0.0);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(Softmax, ShiftInvariant) {
  const std::vector<double> s{0.3, -1.2, 2.5, 0.0};
  std::vector<double> shifted = s;
  for (double& v : shifted) v += 123.456;
  const auto a = softmax(s), b = softmax(shifted);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(Softmax, HugeScoresStayFinite) {
  const std::vector<double> s{1000.0, 1000.0};
  const auto a = softmax(s);
  EXPECT_EQ(a[0], 0.5);
  EXPECT_EQ(a[1], 0.5);
}
