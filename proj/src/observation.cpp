#include "ardq/observation.hpp"

#include <stdexcept>
#include <string>

namespace ardq {

void ObsParams::validate(int map_size) const {
  if (local_size < 1 || local_size % 2 == 0) throw std::invalid_argument("obs: local_size must be odd and positive");
  if (local_size > centered_size(map_size))
    throw std::invalid_argument("obs: local_size " + std::to_string(local_size) + " exceeds the centered map (" +
                                std::to_string(centered_size(map_size)) + ")");
  if (global_scale < 1) throw std::invalid_argument("obs: global_scale must be >= 1");
  if (!(data_normalizer > 0.0)) throw std::invalid_argument("obs: data_normalizer must be positive");
}

Tensor3 map_layers(const EnvironmentMap& map, const Grid<double>& target_layer, Coord uav_cell,
                   double target_scale) {
  const int g = map.size();
  if (target_layer.size() != g) throw std::invalid_argument("map_layers: target layer size mismatch");
  Tensor3 out(g, g, kObsChannels);
  for (int x = 0; x < g; ++x) {
    for (int y = 0; y < g; ++y) {
      const Cell c = map.at({x, y});
      out(x, y, kLandingChannel) = is_landing(c) ? 1.0 : 0.0;
      out(x, y, kNoOccupyChannel) = no_occupy(c) ? 1.0 : 0.0;
      out(x, y, kRadioBlockChannel) = blocks_radio(c) ? 1.0 : 0.0;
      out(x, y, kTargetChannel) = target_layer[{x, y}] / target_scale;
    }
  }
  out(uav_cell.x, uav_cell.y, kUavChannel) = 1.0;
  return out;
}

Tensor3 center_map(const Tensor3& layers, Coord uav_cell) {
  const int g = layers.height();
  if (layers.width() != g) throw std::invalid_argument("center_map: layers must be square");
  if (uav_cell.x < 0 || uav_cell.y < 0 || uav_cell.x >= g || uav_cell.y >= g)
    throw std::invalid_argument("center_map: UAV cell outside the map");
  const int n = 2 * g - 1;
  const int c = layers.channels();
  Tensor3 out(n, n, c);
  for (int i = 0; i < n; ++i) {
    const int x = i - (g - 1) + uav_cell.x;
    for (int j = 0; j < n; ++j) {
      const int y = j - (g - 1) + uav_cell.y;
      const bool inside = x >= 0 && y >= 0 && x < g && y < g;
      for (int k = 0; k < c; ++k)
        out(i, j, k) = inside ? layers(x, y, k) : (k < kObsChannels ? kOutsidePadding[static_cast<std::size_t>(k)] : 0.0);
    }
  }
  return out;
}

Tensor3 compress_global(const Tensor3& centered, int global_scale) {
  if (global_scale < 1) throw std::invalid_argument("compress_global: scale must be >= 1");
  const int n = centered.height();
  const int c = centered.channels();
  const int m = (n + global_scale - 1) / global_scale;
  const int pad_before = (m * global_scale - n) / 2;
  Tensor3 out(m, m, c);
  const double inv = 1.0 / (static_cast<double>(global_scale) * global_scale);
  for (int bi = 0; bi < m; ++bi)
    for (int bj = 0; bj < m; ++bj)
      for (int k = 0; k < c; ++k) {
        double sum = 0.0;
        for (int di = 0; di < global_scale; ++di) {
          const int i = bi * global_scale + di - pad_before;
          for (int dj = 0; dj < global_scale; ++dj) {
            const int j = bj * global_scale + dj - pad_before;
            const bool inside = i >= 0 && j >= 0 && i < n && j < n;
            sum += inside ? centered(i, j, k) : (k < kObsChannels ? kOutsidePadding[static_cast<std::size_t>(k)] : 0.0);
          }
        }
        out(bi, bj, k) = sum * inv;
      }
  return out;
}

Tensor3 crop_local(const Tensor3& centered, int local_size) {
  const int n = centered.height();
  if (local_size < 1 || local_size % 2 == 0 || local_size > n)
    throw std::invalid_argument("crop_local: local_size must be odd and fit the centered map");
  const int c = centered.channels();
  const int off = (n - 1) / 2 - local_size / 2;
  Tensor3 out(local_size, local_size, c);
  for (int i = 0; i < local_size; ++i)
    for (int j = 0; j < local_size; ++j)
      for (int k = 0; k < c; ++k) out(i, j, k) = centered(i + off, j + off, k);
  return out;
}

Observation observe(const EnvironmentMap& map, const Grid<double>& target_layer, bool target_is_data,
                    const UavState& uav, int initial_budget, const ObsParams& params) {
  if (initial_budget < 1) throw std::invalid_argument("observe: initial budget must be positive");
  const Tensor3 layers =
      map_layers(map, target_layer, uav.position, target_is_data ? params.data_normalizer : 1.0);
  const Tensor3 centered = center_map(layers, uav.position);
  Observation obs;
  obs.local = crop_local(centered, params.local_size);
  obs.global = compress_global(centered, params.global_scale);
  obs.battery_frac = static_cast<double>(uav.battery) / initial_budget;
  return obs;
}

}  // namespace ardq
