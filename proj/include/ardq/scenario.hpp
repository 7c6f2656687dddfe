#pragma once

#include <cstdint>
#include <vector>

#include "ardq/missions.hpp"
#include "ardq/world.hpp"

namespace ardq {

struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// What to randomize per episode. rng_seed fully determines the draw.
struct ScenarioSpec {
  MissionType mission = MissionType::Cpp;
  IntRange movement_budget{150, 300};
  IntRange cpp_zone_count{3, 8};
  /// When positive, the layered CPP target set is trimmed or topped up with
  /// random eligible cells until it holds exactly this many cells.
  int cpp_target_count = 0;
  int device_count = 10;
  RealRange device_data{5.0, 20.0};
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct TargetShape {
  enum class Kind { Rectangle, Disk } kind = Kind::Rectangle;
  Coord origin;   // lower-left corner (rectangle) or center (disk)
  int width = 0;  // rectangle width, or disk diameter
  int height = 0;
};

/// Cells covered by one shape, clipped to the grid.
std::vector<Coord> shape_cells(const TargetShape& shape, int grid_size);

/// The layered shapes behind a CPP target set (count drawn from cpp_zone_count,
/// sizes uniform in [2, ceil(G/4)]).
std::vector<TargetShape> draw_cpp_shapes(const EnvironmentMap& map, const ScenarioSpec& spec);

/// CPP: target indicator layer without tall-building cells.
/// DH: device_count devices on distinct cells that are neither buildings nor
/// landing cells, with initial data uniform in device_data.
/// Throws std::invalid_argument when the spec is infeasible for the map.
MissionState generate_scenario(const EnvironmentMap& map, const ScenarioSpec& spec);

struct Launch {
  Coord start;
  int movement_budget = 0;
};

/// Start cell (uniform over landing cells) and movement budget for an episode.
Launch draw_launch(const EnvironmentMap& map, const ScenarioSpec& spec);

}  // namespace ardq
