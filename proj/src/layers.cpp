#include "ardq/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace ardq {

namespace {

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// y[0..n) += a * x[0..n)
inline void axpy(int n, double a, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

inline double dot(int n, const double* a, const double* b) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void conv2d_relu_forward(const ConvShape& s, const double* input, const double* weight, const double* bias,
                         double* output) {
  const int r = s.kernel / 2;
  const int f = s.filters;
  for (int i = 0; i < s.height; ++i) {
    for (int j = 0; j < s.width; ++j) {
      double* out = output + (static_cast<std::size_t>(i) * s.width + j) * f;
      std::memcpy(out, bias, sizeof(double) * static_cast<std::size_t>(f));
      for (int ki = 0; ki < s.kernel; ++ki) {
        const int ii = i + ki - r;
        if (ii < 0 || ii >= s.height) continue;
        for (int kj = 0; kj < s.kernel; ++kj) {
          const int jj = j + kj - r;
          if (jj < 0 || jj >= s.width) continue;
          const double* in = input + (static_cast<std::size_t>(ii) * s.width + jj) * s.in_channels;
          const double* w = weight + (static_cast<std::size_t>(ki) * s.kernel + kj) * s.in_channels * f;
          for (int c = 0; c < s.in_channels; ++c) {
            if (in[c] != 0.0) axpy(f, in[c], w + static_cast<std::size_t>(c) * f, out);
          }
        }
      }
      for (int k = 0; k < f; ++k) out[k] = out[k] > 0.0 ? out[k] : 0.0;
    }
  }
}

void conv2d_relu_backward(const ConvShape& s, const double* input, const double* output, const double* weight,
                          double* dout, double* dweight, double* dbias, double* dinput) {
  const int r = s.kernel / 2;
  const int f = s.filters;
  const std::size_t cells = static_cast<std::size_t>(s.height) * s.width;
  for (std::size_t p = 0; p < cells * f; ++p)
    if (!(output[p] > 0.0)) dout[p] = 0.0;
  for (int i = 0; i < s.height; ++i) {
    for (int j = 0; j < s.width; ++j) {
      const double* d = dout + (static_cast<std::size_t>(i) * s.width + j) * f;
      bool any = false;
      for (int k = 0; k < f; ++k) any = any || d[k] != 0.0;
      if (!any) continue;
      axpy(f, 1.0, d, dbias);
      for (int ki = 0; ki < s.kernel; ++ki) {
        const int ii = i + ki - r;
        if (ii < 0 || ii >= s.height) continue;
        for (int kj = 0; kj < s.kernel; ++kj) {
          const int jj = j + kj - r;
          if (jj < 0 || jj >= s.width) continue;
          const std::size_t in_off = (static_cast<std::size_t>(ii) * s.width + jj) * s.in_channels;
          const std::size_t w_off = (static_cast<std::size_t>(ki) * s.kernel + kj) * s.in_channels * f;
          for (int c = 0; c < s.in_channels; ++c) {
            const double x = input[in_off + c];
            if (x != 0.0) axpy(f, x, d, dweight + w_off + static_cast<std::size_t>(c) * f);
            if (dinput) dinput[in_off + c] += dot(f, weight + w_off + static_cast<std::size_t>(c) * f, d);
          }
        }
      }
    }
  }
}

void dense_forward(int in, int out, const double* x, const double* weight, const double* bias, double* y) {
  std::memcpy(y, bias, sizeof(double) * static_cast<std::size_t>(out));
  for (int i = 0; i < in; ++i)
    if (x[i] != 0.0) axpy(out, x[i], weight + static_cast<std::size_t>(i) * out, y);
}

void dense_backward(int in, int out, const double* x, const double* weight, const double* dy, double* dweight,
                    double* dbias, double* dx) {
  axpy(out, 1.0, dy, dbias);
  for (int i = 0; i < in; ++i) {
    if (x[i] != 0.0) axpy(out, x[i], dy, dweight + static_cast<std::size_t>(i) * out);
    if (dx) dx[i] += dot(out, weight + static_cast<std::size_t>(i) * out, dy);
  }
}

void lstm_cell_forward(const RecurrentView& p, const double* x, const double* h_prev, const double* c_prev,
                       double* gates, double* c, double* tanh_c, double* h) {
  const int n = p.units;
  const int width = kLstmGates * n;
  std::memcpy(gates, p.b, sizeof(double) * static_cast<std::size_t>(width));
  for (int i = 0; i < p.in; ++i)
    if (x[i] != 0.0) axpy(width, x[i], p.w + static_cast<std::size_t>(i) * width, gates);
  for (int j = 0; j < n; ++j)
    if (h_prev[j] != 0.0) axpy(width, h_prev[j], p.u + static_cast<std::size_t>(j) * width, gates);
  for (int k = 0; k < 3 * n; ++k) gates[k] = sigmoid(gates[k]);
  for (int k = 3 * n; k < width; ++k) gates[k] = std::tanh(gates[k]);
  const double* fg = gates;
  const double* ig = gates + n;
  const double* og = gates + 2 * n;
  const double* cand = gates + 3 * n;
  for (int k = 0; k < n; ++k) {
    c[k] = fg[k] * c_prev[k] + ig[k] * cand[k];
    tanh_c[k] = std::tanh(c[k]);
    h[k] = og[k] * tanh_c[k];
  }
}

void lstm_cell_backward(const RecurrentView& p, const RecurrentGrad& g, const double* x, const double* h_prev,
                        const double* c_prev, const double* gates, const double* tanh_c, const double* dh,
                        double* dc, double* dx, double* dh_prev, double* scratch) {
  const int n = p.units;
  const int width = kLstmGates * n;
  const double* fg = gates;
  const double* ig = gates + n;
  const double* og = gates + 2 * n;
  const double* cand = gates + 3 * n;
  double* dz = scratch;
  for (int k = 0; k < n; ++k) {
    const double dct = dc[k] + dh[k] * og[k] * (1.0 - tanh_c[k] * tanh_c[k]);
    dz[k] = dct * c_prev[k] * fg[k] * (1.0 - fg[k]);
    dz[n + k] = dct * cand[k] * ig[k] * (1.0 - ig[k]);
    dz[2 * n + k] = dh[k] * tanh_c[k] * og[k] * (1.0 - og[k]);
    dz[3 * n + k] = dct * ig[k] * (1.0 - cand[k] * cand[k]);
    dc[k] = dct * fg[k];
  }
  axpy(width, 1.0, dz, g.b);
  for (int i = 0; i < p.in; ++i) {
    if (x[i] != 0.0) axpy(width, x[i], dz, g.w + static_cast<std::size_t>(i) * width);
    if (dx) dx[i] += dot(width, p.w + static_cast<std::size_t>(i) * width, dz);
  }
  for (int j = 0; j < n; ++j) {
    if (h_prev[j] != 0.0) axpy(width, h_prev[j], dz, g.u + static_cast<std::size_t>(j) * width);
    if (dh_prev) dh_prev[j] += dot(width, p.u + static_cast<std::size_t>(j) * width, dz);
  }
}

void gru_cell_forward(const RecurrentView& p, const double* x, const double* h_prev, double* gates, double* rh,
                      double* h) {
  const int n = p.units;
  const int width = kGruGates * n;
  std::memcpy(gates, p.b, sizeof(double) * static_cast<std::size_t>(width));
  for (int i = 0; i < p.in; ++i)
    if (x[i] != 0.0) axpy(width, x[i], p.w + static_cast<std::size_t>(i) * width, gates);
  // Update and reset gates see U h_prev; the candidate sees U (r * h_prev).
  for (int j = 0; j < n; ++j)
    if (h_prev[j] != 0.0) axpy(2 * n, h_prev[j], p.u + static_cast<std::size_t>(j) * width, gates);
  for (int k = 0; k < 2 * n; ++k) gates[k] = sigmoid(gates[k]);
  const double* r = gates + n;
  for (int k = 0; k < n; ++k) rh[k] = r[k] * h_prev[k];
  double* cand = gates + 2 * n;
  for (int j = 0; j < n; ++j)
    if (rh[j] != 0.0) axpy(n, rh[j], p.u + static_cast<std::size_t>(j) * width + 2 * n, cand);
  for (int k = 0; k < n; ++k) cand[k] = std::tanh(cand[k]);
  const double* z = gates;
  for (int k = 0; k < n; ++k) h[k] = (1.0 - z[k]) * h_prev[k] + z[k] * cand[k];
}

void gru_cell_backward(const RecurrentView& p, const RecurrentGrad& g, const double* x, const double* h_prev,
                       const double* gates, const double* rh, const double* dh, double* dx, double* dh_prev,
                       double* scratch) {
  const int n = p.units;
  const int width = kGruGates * n;
  const double* z = gates;
  const double* r = gates + n;
  const double* cand = gates + 2 * n;
  double* da = scratch;       // pre-activation gradients [z r h~]
  double* drh = scratch + width;
  for (int k = 0; k < n; ++k) {
    da[k] = dh[k] * (cand[k] - h_prev[k]) * z[k] * (1.0 - z[k]);
    da[2 * n + k] = dh[k] * z[k] * (1.0 - cand[k] * cand[k]);
    drh[k] = 0.0;
  }
  // Candidate path through U_h (r * h_prev).
  for (int j = 0; j < n; ++j) {
    const double* uh = p.u + static_cast<std::size_t>(j) * width + 2 * n;
    if (rh[j] != 0.0) axpy(n, rh[j], da + 2 * n, g.u + static_cast<std::size_t>(j) * width + 2 * n);
    drh[j] = dot(n, uh, da + 2 * n);
  }
  for (int k = 0; k < n; ++k) da[n + k] = drh[k] * h_prev[k] * r[k] * (1.0 - r[k]);

  axpy(width, 1.0, da, g.b);
  for (int i = 0; i < p.in; ++i) {
    if (x[i] != 0.0) axpy(width, x[i], da, g.w + static_cast<std::size_t>(i) * width);
    if (dx) dx[i] += dot(width, p.w + static_cast<std::size_t>(i) * width, da);
  }
  for (int j = 0; j < n; ++j) {
    const double* u = p.u + static_cast<std::size_t>(j) * width;
    if (h_prev[j] != 0.0) axpy(2 * n, h_prev[j], da, g.u + static_cast<std::size_t>(j) * width);
    if (dh_prev) dh_prev[j] += dh[j] * (1.0 - z[j]) + drh[j] * r[j] + dot(2 * n, u, da);
  }
}

LstmState lstm_step(std::span<const double> x, std::span<const double> h_prev, std::span<const double> c_prev,
                    const RecurrentView& p) {
  const auto n = static_cast<std::size_t>(p.units);
  if (x.size() != static_cast<std::size_t>(p.in) || h_prev.size() != n || c_prev.size() != n)
    throw std::invalid_argument("lstm_step: shape mismatch");
  std::vector<double> gates(kLstmGates * n), tanh_c(n);
  LstmState s{std::vector<double>(n), std::vector<double>(n)};
  lstm_cell_forward(p, x.data(), h_prev.data(), c_prev.data(), gates.data(), s.c.data(), tanh_c.data(), s.h.data());
  return s;
}

std::vector<double> gru_step(std::span<const double> x, std::span<const double> h_prev, const RecurrentView& p) {
  const auto n = static_cast<std::size_t>(p.units);
  if (x.size() != static_cast<std::size_t>(p.in) || h_prev.size() != n)
    throw std::invalid_argument("gru_step: shape mismatch");
  std::vector<double> gates(kGruGates * n), rh(n), h(n);
  gru_cell_forward(p, x.data(), h_prev.data(), gates.data(), rh.data(), h.data());
  return h;
}

void attention_forward(const AttentionView& p, int steps, const double* seq, double* u, double* scores,
                       double* weights, double* pooled) {
  const int d = p.width;
  const int n = p.units;
  for (int t = 0; t < steps; ++t) {
    double* ut = u + static_cast<std::size_t>(t) * n;
    dense_forward(d, n, seq + static_cast<std::size_t>(t) * d, p.w, p.b, ut);
    for (int k = 0; k < n; ++k) ut[k] = std::tanh(ut[k]);
    scores[t] = dot(n, ut, p.context);
  }
  double mx = scores[0];
  for (int t = 1; t < steps; ++t) mx = std::max(mx, scores[t]);
  double z = 0.0;
  for (int t = 0; t < steps; ++t) {
    weights[t] = std::exp(scores[t] - mx);
    z += weights[t];
  }
  for (int t = 0; t < steps; ++t) weights[t] /= z;
  std::fill(pooled, pooled + d, 0.0);
  for (int t = 0; t < steps; ++t) axpy(d, weights[t], seq + static_cast<std::size_t>(t) * d, pooled);
}

void attention_backward(const AttentionView& p, const AttentionGrad& g, int steps, const double* seq,
                        const double* u, const double* weights, const double* dpooled, double* dseq,
                        double* scratch) {
  const int d = p.width;
  const int n = p.units;
  // da_t = dV . h_t; ds_t = a_t (da_t - sum_j a_j da_j)
  double mean = 0.0;
  for (int t = 0; t < steps; ++t) mean += weights[t] * dot(d, dpooled, seq + static_cast<std::size_t>(t) * d);
  for (int t = 0; t < steps; ++t) {
    const double* ht = seq + static_cast<std::size_t>(t) * d;
    const double* ut = u + static_cast<std::size_t>(t) * n;
    double* dht = dseq + static_cast<std::size_t>(t) * d;
    axpy(d, weights[t], dpooled, dht);
    const double ds = weights[t] * (dot(d, dpooled, ht) - mean);
    if (ds == 0.0) continue;
    axpy(n, ds, ut, g.context);
    for (int k = 0; k < n; ++k) scratch[k] = ds * p.context[k] * (1.0 - ut[k] * ut[k]);
    dense_backward(d, n, ht, p.w, scratch, g.w, g.b, dht);
  }
}

std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) return {};
  const double mx = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - mx);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

}  // namespace ardq
