#include "ardq/missions.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ardq/geometry.hpp"

namespace ardq {

std::string_view mission_name(MissionType m) { return m == MissionType::Cpp ? "cpp" : "dh"; }

MissionType parse_mission(std::string_view name) {
  if (name == "cpp" || name == "CPP") return MissionType::Cpp;
  if (name == "dh" || name == "DH") return MissionType::Dh;
  throw std::invalid_argument("unknown mission '" + std::string(name) + "' (expected cpp or dh)");
}

double MissionState::remaining_total() const {
  const auto& v = target_layer.values();
  return std::accumulate(v.begin(), v.end(), 0.0);
}

FieldOfView compute_fov(Coord uav_cell, const EnvironmentMap& map, int radius) {
  FieldOfView fov;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const Coord c{uav_cell.x + dx, uav_cell.y + dy};
      if (!map.contains(c)) continue;
      if (segment_clear(uav_cell, c, [&](Coord b) { return blocks_camera(map.at(b)); })) fov.covered.push_back(c);
    }
  }
  return fov;
}

CoverageUpdate apply_coverage(const MissionState& state, const FieldOfView& fov) {
  if (state.mission != MissionType::Cpp) throw std::logic_error("apply_coverage: not a CPP mission");
  CoverageUpdate out{state, 0};
  for (const Coord& c : fov.covered) {
    double& v = out.state.target_layer[c];
    if (v != 0.0) {
      v = 0.0;
      ++out.newly_covered;
    }
  }
  return out;
}

HarvestUpdate apply_harvest(const MissionState& state, std::span<const double> amounts) {
  if (state.mission != MissionType::Dh) throw std::logic_error("apply_harvest: not a DH mission");
  if (amounts.size() != state.devices.size()) throw std::logic_error("apply_harvest: one amount per device required");
  HarvestUpdate out{state, 0.0};
  for (std::size_t i = 0; i < amounts.size(); ++i) {
    const double a = amounts[i];
    DeviceState& d = out.state.devices[i];
    if (a < 0.0 || a > d.remaining_data)
      throw std::logic_error("apply_harvest: device " + std::to_string(i) + " asked for " + std::to_string(a) +
                             " but holds " + std::to_string(d.remaining_data));
    if (a == 0.0) continue;
    d.remaining_data -= a;
    d.collected_data += a;
    out.state.target_layer[d.position] = d.remaining_data;
    out.total_collected += a;
  }
  return out;
}

MissionState apply_arrivals(const MissionState& state, double lambda, CounterRng& rng) {
  if (state.mission != MissionType::Dh || lambda <= 0.0) return state;
  MissionState out = state;
  for (DeviceState& d : out.devices) {
    const int k = rng.poisson(lambda);
    if (k == 0) continue;
    d.initial_data += k;
    d.remaining_data += k;
    out.initial_total += k;
    out.target_layer[d.position] = d.remaining_data;
  }
  return out;
}

Metrics episode_metrics(const MissionState& initial, const MissionState& final_state, bool landed) {
  Metrics m;
  m.landed = landed;
  if (final_state.mission == MissionType::Cpp) {
    if (initial.initial_total > 0.0) {
      const double done = initial.remaining_total() - final_state.remaining_total();
      m.coverage_ratio = std::clamp(done / initial.initial_total, 0.0, 1.0);
    }
  } else if (final_state.initial_total > 0.0) {
    // arrivals grow the total, so the final state holds the denominator
    double done = 0.0;
    for (const DeviceState& d : final_state.devices) done += d.collected_data;
    m.collection_ratio = std::clamp(done / final_state.initial_total, 0.0, 1.0);
  }
  return m;
}

}  // namespace ardq
