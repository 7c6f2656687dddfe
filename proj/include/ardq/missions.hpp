#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "ardq/grid.hpp"
#include "ardq/radio.hpp"
#include "ardq/rng.hpp"
#include "ardq/world.hpp"

namespace ardq {

enum class MissionType { Cpp, Dh };

std::string_view mission_name(MissionType m);
MissionType parse_mission(std::string_view name);

/// Mission progress behind one target layer D(t).
///  CPP: target_layer is the 0/1 indicator of cells still to be covered.
///  DH:  target_layer holds each device's remaining data at its cell, 0 elsewhere.
struct MissionState {
  MissionType mission = MissionType::Cpp;
  Grid<double> target_layer;
  std::vector<DeviceState> devices;  // DH only
  double initial_total = 0.0;        // initial target-cell count or initial total data

  double remaining_total() const;
};

struct FieldOfView {
  std::vector<Coord> covered;
};

inline constexpr int kFovRadius = 2;  // 5 x 5 window

/// Cells of the clipped window around the UAV that the camera can see.
/// Only tall buildings occlude; the UAV's own cell is always included.
FieldOfView compute_fov(Coord uav_cell, const EnvironmentMap& map, int radius = kFovRadius);

struct CoverageUpdate {
  MissionState state;
  int newly_covered = 0;
};

/// T(t+1) = T(t) and not V(t). Throws std::logic_error on a DH state.
CoverageUpdate apply_coverage(const MissionState& state, const FieldOfView& fov);

struct HarvestUpdate {
  MissionState state;
  double total_collected = 0.0;
};

/// Drains the devices by the given per-device amounts. Throws
/// std::logic_error on a CPP state, on a size mismatch, or when an amount
/// exceeds the device's remaining data.
HarvestUpdate apply_harvest(const MissionState& state, std::span<const double> amounts);

/// Poisson data arrivals (off unless a positive rate is configured). New data
/// counts toward both the remaining and the initial totals.
MissionState apply_arrivals(const MissionState& state, double lambda, CounterRng& rng);

struct Metrics {
  double coverage_ratio = 0.0;    // CPP
  double collection_ratio = 0.0;  // DH
  bool landed = false;
};

Metrics episode_metrics(const MissionState& initial, const MissionState& final_state, bool landed);

}  // namespace ardq
