#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ardq/qnet.hpp"
#include "ardq/world.hpp"

namespace ardq::check {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Random map with i.i.d. cell types; at least one landing cell.
EnvironmentMap random_map(int size, double building_density, std::uint64_t seed);

/// has_los over `device_cells` random device sites x every UAV cell, and
/// compute_fov at every cell, against the sampling oracle.
SuiteResult geometry_suite(int maps = 200, int size = 16, int device_cells = 32, std::uint64_t seed = 11);

/// center_map against the index formula on random maps and UAV cells.
SuiteResult centering_suite(int cases = 100, std::uint64_t seed = 12);

/// The small network used by the gradient gate: l_s = 5, 3 x 3 global map,
/// f = 2, n_u = 3.
NetConfig small_net(CoreType core, bool attention);
InputShape small_input();

/// Finite-difference check of every core with attention on and off.
SuiteResult gradient_suite(double tolerance = 1e-4, std::uint64_t seed = 13);

/// Double-Q target selection/valuation split and soft-update identities.
SuiteResult ddqn_suite();

/// Random-policy episodes checked for the battery law, frozen state after
/// landing, target depletion, data conservation and one device per TDMA slot.
SuiteResult fuzz_suite(int episodes = 10000, std::uint64_t seed = 14);

}  // namespace ardq::check
