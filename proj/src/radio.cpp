#include "ardq/radio.hpp"

#include <cmath>
#include <stdexcept>

#include "ardq/geometry.hpp"

namespace ardq {

void ChannelParams::validate() const {
  if (!std::isfinite(tx_power_over_noise_db)) throw std::invalid_argument("channel: tx power must be finite");
  if (!(pathloss_exp_los > 0.0) || !(pathloss_exp_nlos > 0.0))
    throw std::invalid_argument("channel: path-loss exponents must be positive");
  if (pathloss_exp_nlos < pathloss_exp_los)
    throw std::invalid_argument("channel: NLoS path-loss exponent must be >= LoS exponent");
  if (shadow_sigma_los_db < 0.0 || shadow_sigma_nlos_db < 0.0)
    throw std::invalid_argument("channel: shadowing sigma must be >= 0");
  if (comm_slots_per_mission_slot < 1) throw std::invalid_argument("channel: need >= 1 communication slot");
  if (!(comm_slot_seconds > 0.0)) throw std::invalid_argument("channel: slot length must be positive");
}

Point3 cell_point(Coord c, const EnvironmentMap& map, double z) {
  return {(c.x + 0.5) * map.cell_size_m(), (c.y + 0.5) * map.cell_size_m(), z};
}

bool has_los(Coord uav_cell, Coord device_cell, const EnvironmentMap& map) {
  return segment_clear(uav_cell, device_cell, [&](Coord c) { return blocks_radio(map.at(c)); });
}

double snr(const Point3& uav, const Point3& device, bool los, double shadow_db, const ChannelParams& params) {
  const double dx = uav.x - device.x;
  const double dy = uav.y - device.y;
  const double dz = uav.z - device.z;
  const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (!(d > 0.0)) throw std::domain_error("snr: zero link distance");
  const double alpha = los ? params.pathloss_exp_los : params.pathloss_exp_nlos;
  return std::pow(10.0, params.tx_power_over_noise_db / 10.0) * std::pow(d, -alpha) *
         std::pow(10.0, shadow_db / 10.0);
}

double achievable_rate(double snr_linear) { return std::log2(1.0 + snr_linear); }

double effective_rate(double rate, double remaining, double slot_seconds) {
  return std::min(rate, remaining / slot_seconds);
}

HarvestPlan schedule_and_collect(const UavState& uav, std::span<const DeviceState> devices,
                                 const EnvironmentMap& map, const ChannelParams& params, CounterRng& rng) {
  if (!uav.operational) throw std::logic_error("schedule_and_collect: UAV is not operational");
  const std::size_t k = devices.size();
  HarvestPlan plan;
  plan.collected.assign(k, 0.0);
  plan.scheduled.assign(static_cast<std::size_t>(params.comm_slots_per_mission_slot), -1);

  const Point3 uav_pos = cell_point(uav.position, map, uav.airborne ? map.uav_height_m() : 0.0);
  std::vector<double> remaining(k);
  std::vector<char> los(k);
  for (std::size_t i = 0; i < k; ++i) {
    remaining[i] = devices[i].remaining_data;
    los[i] = has_los(uav.position, devices[i].position, map) ? 1 : 0;
  }

  const double slot = params.comm_slot_seconds;
  for (int n = 0; n < params.comm_slots_per_mission_slot; ++n) {
    int best = -1;
    double best_rate = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      // Fading is drawn for every device in every slot so the stream does not
      // depend on which devices still hold data.
      const double sigma = los[i] ? params.shadow_sigma_los_db : params.shadow_sigma_nlos_db;
      const double shadow = sigma * rng.normal();
      if (!(remaining[i] > 0.0)) continue;
      const double s = snr(uav_pos, cell_point(devices[i].position, map, 0.0), los[i] != 0, shadow, params);
      const double r = effective_rate(achievable_rate(s), remaining[i], slot);
      if (best < 0 || r > best_rate) {
        best = static_cast<int>(i);
        best_rate = r;
      }
    }
    if (best < 0 || !(best_rate > 0.0)) continue;
    const auto b = static_cast<std::size_t>(best);
    const double amount = std::min(remaining[b], slot * best_rate);
    remaining[b] -= amount;
    // A drained device gives up exactly what it held, whatever the rounding of the partial sums.
    plan.collected[b] = remaining[b] > 0.0 ? plan.collected[b] + amount : devices[b].remaining_data;
    plan.throughput += best_rate;
    plan.scheduled[static_cast<std::size_t>(n)] = best;
  }
  return plan;
}

}  // namespace ardq
