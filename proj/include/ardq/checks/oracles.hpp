#pragma once

// Reference implementations used only to check the library. They favour
// obviousness over speed and share no code with the routines they check.

#include <functional>
#include <span>
#include <vector>

#include "ardq/grid.hpp"
#include "ardq/observation.hpp"
#include "ardq/qnet.hpp"
#include "ardq/world.hpp"

namespace ardq::oracle {

inline constexpr int kLineSamples = 1000;

/// Samples the open segment between the two cell centers at t = i/(n-1) and
/// reports whether any sample outside the endpoint cells lands in a blocked cell.
bool sampled_clear(Coord from, Coord to, const std::function<bool(Coord)>& blocked, int samples = kLineSamples);

/// Radio line of sight: tall and small buildings block.
bool has_los(const EnvironmentMap& map, Coord uav, Coord device);

/// Camera footprint: every in-grid cell within Chebyshev distance 2 whose
/// sampled segment avoids tall buildings. Sorted by (y, x).
std::vector<Coord> fov(const EnvironmentMap& map, Coord uav);

/// out(i, j) = in(i - (G-1) + x, j - (G-1) + y), padding outside the grid.
Tensor3 center_map(const Tensor3& layers, Coord uav);

/// Same-padding convolution + ReLU written as the textbook sum.
std::vector<double> conv2d_relu(int size, int cin, int cout, int kernel, std::span<const double> in,
                                std::span<const double> weight, std::span<const double> bias);

struct GradientCheck {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  double battery_rel_error = 0.0;
  double battery_numeric = 0.0;
};

/// Relative error with a floor on the denominator so exact zeros compare sanely.
double relative_error(double a, double b, double floor = 1e-6);

/// Central differences of L = dq . Q(obs; params) against the network's
/// backward pass, over every parameter and the battery input.
GradientCheck check_gradients(const QNetwork& net, const Observation& obs, std::span<const double> params,
                              const ActionValues& dq, double eps = 1e-5);

}  // namespace ardq::oracle
