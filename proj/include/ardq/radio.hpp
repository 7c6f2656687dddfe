#pragma once

#include <span>
#include <vector>

#include "ardq/dynamics.hpp"
#include "ardq/grid.hpp"
#include "ardq/rng.hpp"
#include "ardq/world.hpp"

namespace ardq {

/// Air-to-ground channel constants. The defaults are engineering values, all
/// configurable.
struct ChannelParams {
  double tx_power_over_noise_db = 60.0;
  double pathloss_exp_los = 2.3;
  double pathloss_exp_nlos = 3.0;
  double shadow_sigma_los_db = 2.0;
  double shadow_sigma_nlos_db = 5.0;
  int comm_slots_per_mission_slot = 4;
  double comm_slot_seconds = 0.5;

  void validate() const;
};

/// A ground IoT device. remaining + collected == initial at all times.
struct DeviceState {
  Coord position;
  double initial_data = 0.0;
  double remaining_data = 0.0;
  double collected_data = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Cell center in meters at altitude z.
Point3 cell_point(Coord c, const EnvironmentMap& map, double z);

/// Line of sight between two cells: the segment between cell centers crosses
/// no radio-blocking cell (tall or small building). Endpoints are excluded.
bool has_los(Coord uav_cell, Coord device_cell, const EnvironmentMap& map);

/// Received SNR (linear) for a link of 3-D length d:
///   10^(P/10) * d^(-alpha_e) * 10^(shadow_db/10)
/// with alpha_e picked by `los`. Throws std::domain_error for d == 0.
double snr(const Point3& uav, const Point3& device, bool los, double shadow_db, const ChannelParams& params);

/// log2(1 + snr)
double achievable_rate(double snr_linear);

/// A device cannot send more than it holds within one slot.
double effective_rate(double rate, double remaining, double slot_seconds);

struct HarvestPlan {
  std::vector<double> collected;  // per device, over the whole mission slot
  double throughput = 0.0;        // C(t): sum of scheduled effective rates
  std::vector<int> scheduled;     // device index per communication slot, -1 when idle
};

/// TDMA over the communication slots of one mission slot. In every slot the
/// device with the largest effective rate among those still holding data is
/// served (ties to the lowest index) and drained by slot_seconds * rate.
/// Shadow fading is drawn per device and slot from `rng`. Does not modify
/// `devices`; apply the result with apply_harvest.
HarvestPlan schedule_and_collect(const UavState& uav, std::span<const DeviceState> devices,
                                 const EnvironmentMap& map, const ChannelParams& params, CounterRng& rng);

}  // namespace ardq
