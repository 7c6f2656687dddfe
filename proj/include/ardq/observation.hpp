#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ardq/dynamics.hpp"
#include "ardq/grid.hpp"
#include "ardq/world.hpp"

namespace ardq {

/// Dense H x W x C array, channel-fastest. Index (i, j) follows map
/// coordinates: i along x (east), j along y (north).
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int h, int w, int c, double fill = 0.0)
      : h_(h), w_(w), c_(c), data_(static_cast<std::size_t>(h) * w * c, fill) {}

  int height() const { return h_; }
  int width() const { return w_; }
  int channels() const { return c_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int i, int j, int k) { return data_[offset(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[offset(i, j, k)]; }
  std::size_t offset(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * w_ + j) * c_ + k;
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  int h_ = 0;
  int w_ = 0;
  int c_ = 0;
  std::vector<double> data_;
};

/// Map channel order.
enum ObsChannel : int { kLandingChannel = 0, kNoOccupyChannel, kRadioBlockChannel, kTargetChannel, kUavChannel };
inline constexpr int kObsChannels = 5;

/// Value read for cells outside the world: it looks unflyable.
inline constexpr std::array<double, kObsChannels> kOutsidePadding = {0.0, 1.0, 1.0, 0.0, 0.0};

struct ObsParams {
  int local_size = 17;          // odd crop width l_s
  int global_scale = 5;         // average-pooling factor g_s
  double data_normalizer = 20.0;  // DH target channel divisor (max initial datum)

  void validate(int map_size) const;
  int centered_size(int map_size) const { return 2 * map_size - 1; }
  int global_size(int map_size) const {
    return (centered_size(map_size) + global_scale - 1) / global_scale;
  }
};

struct Observation {
  Tensor3 local;
  Tensor3 global;
  double battery_frac = 0.0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// G x G x 5 stack in channel order above; the target channel is
/// target_layer / target_scale.
Tensor3 map_layers(const EnvironmentMap& map, const Grid<double>& target_layer, Coord uav_cell,
                   double target_scale = 1.0);

/// (2G-1) x (2G-1) map with the UAV cell at (G-1, G-1).
Tensor3 center_map(const Tensor3& layers, Coord uav_cell);

/// Pads with kOutsidePadding (split evenly, extra cell after) to a multiple of
/// g_s and average-pools non-overlapping g_s x g_s blocks.
Tensor3 compress_global(const Tensor3& centered, int global_scale);

/// Unscaled l_s x l_s window around the center cell.
Tensor3 crop_local(const Tensor3& centered, int local_size);

/// CPP targets are 0/1 already; the DH channel is divided by data_normalizer.
Observation observe(const EnvironmentMap& map, const Grid<double>& target_layer, bool target_is_data,
                    const UavState& uav, int initial_budget, const ObsParams& params);

}  // namespace ardq
