#pragma once

#include <span>
#include <vector>

namespace ardq {

// Raw building blocks of the Q-network. Every backward routine *accumulates*
// into its gradient outputs, so callers zero them once per minibatch.

struct ConvShape {
  int height = 0;
  int width = 0;
  int in_channels = 0;
  int filters = 0;
  int kernel = 0;  // odd; zero "same" padding, stride 1
};

/// Cross-correlation + bias + ReLU. Layouts: input [H][W][Cin],
/// weight [k][k][Cin][F], bias [F], output [H][W][F].
void conv2d_relu_forward(const ConvShape& s, const double* input, const double* weight, const double* bias,
                         double* output);

/// `dout` is the gradient w.r.t. the post-ReLU output and is overwritten with
/// the pre-activation gradient. `dinput` may be null.
void conv2d_relu_backward(const ConvShape& s, const double* input, const double* output, const double* weight,
                          double* dout, double* dweight, double* dbias, double* dinput);

/// y = x W + b with W stored [in][out].
void dense_forward(int in, int out, const double* x, const double* weight, const double* bias, double* y);
void dense_backward(int in, int out, const double* x, const double* weight, const double* dy, double* dweight,
                    double* dbias, double* dx);

inline constexpr int kLstmGates = 4;  // packed order: forget, input, output, candidate
inline constexpr int kGruGates = 3;   // packed order: update z, reset r, candidate

/// Packed recurrent weights: W [in][G*n], U [n][G*n], b [G*n].
struct RecurrentView {
  const double* w = nullptr;
  const double* u = nullptr;
  const double* b = nullptr;
  int in = 0;
  int units = 0;
};

struct RecurrentGrad {
  double* w = nullptr;
  double* u = nullptr;
  double* b = nullptr;
};

/// gates receives the activated gate values [f i o c~]; c, tanh_c, h are n-vectors.
void lstm_cell_forward(const RecurrentView& p, const double* x, const double* h_prev, const double* c_prev,
                       double* gates, double* c, double* tanh_c, double* h);

/// dh: gradient on h_t. dc: on entry the gradient arriving at c_t from step
/// t+1, on exit the gradient w.r.t. c_prev. dx / dh_prev accumulate (either may
/// be null). scratch needs 4n doubles.
void lstm_cell_backward(const RecurrentView& p, const RecurrentGrad& g, const double* x, const double* h_prev,
                        const double* c_prev, const double* gates, const double* tanh_c, const double* dh,
                        double* dc, double* dx, double* dh_prev, double* scratch);

/// z, r = sigmoid(.), h~ = tanh(W x + U (r*h_prev) + b), h = (1-z) h_prev + z h~.
/// gates receives [z r h~]; rh receives r*h_prev.
void gru_cell_forward(const RecurrentView& p, const double* x, const double* h_prev, double* gates, double* rh,
                      double* h);

/// scratch needs 3n + n doubles.
void gru_cell_backward(const RecurrentView& p, const RecurrentGrad& g, const double* x, const double* h_prev,
                       const double* gates, const double* rh, const double* dh, double* dx, double* dh_prev,
                       double* scratch);

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

LstmState lstm_step(std::span<const double> x, std::span<const double> h_prev, std::span<const double> c_prev,
                    const RecurrentView& p);
std::vector<double> gru_step(std::span<const double> x, std::span<const double> h_prev, const RecurrentView& p);

/// Attention pooling over a sequence of T vectors of width d:
///   u_k = tanh(W^T h_k + b),  s_k = u_k . u_s,  a = softmax(s),  V = sum_k a_k h_k
/// W is [d][n], b and context are [n].
struct AttentionView {
  const double* w = nullptr;
  const double* b = nullptr;
  const double* context = nullptr;
  int width = 0;
  int units = 0;
};

struct AttentionGrad {
  double* w = nullptr;
  double* b = nullptr;
  double* context = nullptr;
};

/// u: [T][n], scores: [T], weights: [T], pooled: [d]. Softmax subtracts the max score.
void attention_forward(const AttentionView& p, int steps, const double* seq, double* u, double* scores,
                       double* weights, double* pooled);
/// dseq accumulates. scratch needs n doubles.
void attention_backward(const AttentionView& p, const AttentionGrad& g, int steps, const double* seq,
                        const double* u, const double* weights, const double* dpooled, double* dseq,
                        double* scratch);

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> scores);

}  // namespace ardq
