#include "ardq/checks/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ardq::oracle {

bool sampled_clear(Coord from, Coord to, const std::function<bool(Coord)>& blocked, int samples) {
  const double x0 = from.x + 0.5, y0 = from.y + 0.5;
  const double dx = to.x - from.x, dy = to.y - from.y;
  for (int i = 0; i < samples; ++i) {
    const double t = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
    const Coord c{static_cast<int>(std::floor(x0 + t * dx)), static_cast<int>(std::floor(y0 + t * dy))};
    if (c == from || c == to) continue;
    if (blocked(c)) return false;
  }
  return true;
}

bool has_los(const EnvironmentMap& map, Coord uav, Coord device) {
  return sampled_clear(uav, device, [&](Coord c) {
    const Cell k = map.at(c);
    return k == Cell::TallBuilding || k == Cell::SmallBuilding;
  });
}

std::vector<Coord> fov(const EnvironmentMap& map, Coord uav) {
  std::vector<Coord> out;
  for (int y = 0; y < map.size(); ++y)
    for (int x = 0; x < map.size(); ++x) {
      if (std::max(std::abs(x - uav.x), std::abs(y - uav.y)) > 2) continue;
      if (sampled_clear(uav, {x, y}, [&](Coord c) { return map.at(c) == Cell::TallBuilding; }))
        out.push_back({x, y});
    }
  return out;
}

Tensor3 center_map(const Tensor3& layers, Coord uav) {
  const int g = layers.height();
  const int n = 2 * g - 1;
  Tensor3 out(n, n, layers.channels());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int sx = i - (g - 1) + uav.x;
      const int sy = j - (g - 1) + uav.y;
      const bool inside = sx >= 0 && sy >= 0 && sx < g && sy < g;
      for (int c = 0; c < layers.channels(); ++c)
        out(i, j, c) = inside ? layers(sx, sy, c) : kOutsidePadding[static_cast<std::size_t>(c)];
    }
  return out;
}

std::vector<double> conv2d_relu(int size, int cin, int cout, int kernel, std::span<const double> in,
                                std::span<const double> weight, std::span<const double> bias) {
  const int half = kernel / 2;
  std::vector<double> out(static_cast<std::size_t>(size) * size * cout);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j)
      for (int o = 0; o < cout; ++o) {
        double s = bias[static_cast<std::size_t>(o)];
        for (int di = 0; di < kernel; ++di)
          for (int dj = 0; dj < kernel; ++dj) {
            const int si = i + di - half, sj = j + dj - half;
            if (si < 0 || sj < 0 || si >= size || sj >= size) continue;
            for (int c = 0; c < cin; ++c)
              s += in[(static_cast<std::size_t>(si) * size + sj) * cin + c] *
                   weight[((static_cast<std::size_t>(di) * kernel + dj) * cin + c) * cout + o];
          }
        out[(static_cast<std::size_t>(i) * size + j) * cout + o] = s > 0.0 ? s : 0.0;
      }
  return out;
}

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

namespace {

double weighted(const ActionValues& q, const ActionValues& dq) {
  double s = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) s += q[k] * dq[k];
  return s;
}

}  // namespace

GradientCheck check_gradients(const QNetwork& net, const Observation& obs, std::span<const double> params,
                              const ActionValues& dq, double eps) {
  if (params.size() != net.param_count()) throw std::invalid_argument("check_gradients: parameter count mismatch");
  ForwardCache cache;
  net.forward(obs, params, cache);
  std::vector<double> analytic(params.size(), 0.0);
  const double dbattery = net.backward(cache, params, dq, analytic);

  GradientCheck out;
  std::vector<double> p(params.begin(), params.end());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + eps;
    const double up = weighted(net.forward(obs, p), dq);
    p[i] = keep - eps;
    const double down = weighted(net.forward(obs, p), dq);
    p[i] = keep;
    const double numeric = (up - down) / (2.0 * eps);
    const double err = relative_error(analytic[i], numeric);
    if (i == 0 || err > out.max_rel_error) {
      out.max_rel_error = err;
      out.worst_index = i;
      out.worst_analytic = analytic[i];
      out.worst_numeric = numeric;
    }
  }

  Observation shifted = obs;
  shifted.battery_frac = obs.battery_frac + eps;
  const double up = weighted(net.forward(shifted, params), dq);
  shifted.battery_frac = obs.battery_frac - eps;
  const double down = weighted(net.forward(shifted, params), dq);
  out.battery_numeric = (up - down) / (2.0 * eps);
  out.battery_rel_error = relative_error(dbattery, out.battery_numeric);
  return out;
}

}  // namespace ardq::oracle
