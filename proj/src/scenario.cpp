#include "ardq/scenario.hpp"

#include <algorithm>
#include <stdexcept>

#include "ardq/rng.hpp"

namespace ardq {

namespace {

// Independent streams per purpose so that e.g. changing the budget range does
// not reshuffle target layouts.
constexpr std::uint64_t kShapeStream = 1;
constexpr std::uint64_t kTrimStream = 2;
constexpr std::uint64_t kDeviceStream = 3;
constexpr std::uint64_t kLaunchStream = 4;

void shuffle(std::vector<Coord>& v, CounterRng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

void ScenarioSpec::validate() const {
  if (movement_budget.lo < 1 || movement_budget.hi < movement_budget.lo)
    throw std::invalid_argument("scenario: movement_budget must be a nonempty range of positive integers");
  if (cpp_zone_count.lo < 1 || cpp_zone_count.hi < cpp_zone_count.lo)
    throw std::invalid_argument("scenario: cpp_zone_count must be a nonempty range of positive integers");
  if (cpp_target_count < 0) throw std::invalid_argument("scenario: cpp_target_count must be >= 0");
  if (!(device_data.lo >= 0.0) || device_data.hi < device_data.lo)
    throw std::invalid_argument("scenario: device_data must be a nonempty nonnegative range");
  if (mission == MissionType::Dh && device_count < 1)
    throw std::invalid_argument("scenario: DH missions need at least one device");
}

std::vector<Coord> shape_cells(const TargetShape& shape, int grid_size) {
  std::vector<Coord> cells;
  auto add = [&](Coord c) {
    if (c.x >= 0 && c.y >= 0 && c.x < grid_size && c.y < grid_size) cells.push_back(c);
  };
  if (shape.kind == TargetShape::Kind::Rectangle) {
    for (int y = shape.origin.y; y < shape.origin.y + shape.height; ++y)
      for (int x = shape.origin.x; x < shape.origin.x + shape.width; ++x) add({x, y});
  } else {
    // Discrete disk of the given diameter: cells whose center lies within the
    // radius of the disk center (taken at the center of the origin cell for odd
    // diameters, at its upper-right corner for even ones).
    const double r = shape.width / 2.0;
    const double cx = shape.origin.x + (shape.width % 2 ? 0.5 : 1.0);
    const double cy = shape.origin.y + (shape.width % 2 ? 0.5 : 1.0);
    const int reach = shape.width;
    for (int y = shape.origin.y - reach; y <= shape.origin.y + reach; ++y)
      for (int x = shape.origin.x - reach; x <= shape.origin.x + reach; ++x) {
        const double ddx = x + 0.5 - cx;
        const double ddy = y + 0.5 - cy;
        if (ddx * ddx + ddy * ddy <= r * r) add({x, y});
      }
  }
  return cells;
}

std::vector<TargetShape> draw_cpp_shapes(const EnvironmentMap& map, const ScenarioSpec& spec) {
  CounterRng rng = CounterRng(spec.rng_seed).split(kShapeStream);
  const int g = map.size();
  const int max_size = std::max(2, (g + 3) / 4);
  const int n = static_cast<int>(rng.uniform_int(spec.cpp_zone_count.lo, spec.cpp_zone_count.hi));
  std::vector<TargetShape> shapes;
  shapes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    TargetShape s;
    s.kind = rng.uniform() < 0.5 ? TargetShape::Kind::Rectangle : TargetShape::Kind::Disk;
    s.width = static_cast<int>(rng.uniform_int(2, max_size));
    s.height = s.kind == TargetShape::Kind::Rectangle ? static_cast<int>(rng.uniform_int(2, max_size)) : s.width;
    s.origin = {static_cast<int>(rng.uniform_int(0, g - 1)), static_cast<int>(rng.uniform_int(0, g - 1))};
    shapes.push_back(s);
  }
  return shapes;
}

MissionState generate_scenario(const EnvironmentMap& map, const ScenarioSpec& spec) {
  spec.validate();
  const int g = map.size();
  MissionState state;
  state.mission = spec.mission;
  state.target_layer = Grid<double>(g, 0.0);

  if (spec.mission == MissionType::Cpp) {
    auto eligible = [&](Coord c) { return !is_tall_building(map.at(c)); };
    for (const TargetShape& s : draw_cpp_shapes(map, spec))
      for (const Coord& c : shape_cells(s, g))
        if (eligible(c)) state.target_layer[c] = 1.0;

    if (spec.cpp_target_count > 0) {
      std::vector<Coord> on, off;
      for (int y = 0; y < g; ++y)
        for (int x = 0; x < g; ++x) {
          const Coord c{x, y};
          if (!eligible(c)) continue;
          (state.target_layer[c] != 0.0 ? on : off).push_back(c);
        }
      const auto want = static_cast<std::size_t>(spec.cpp_target_count);
      if (want > on.size() + off.size())
        throw std::invalid_argument("scenario: cpp_target_count exceeds the number of eligible cells");
      CounterRng trim = CounterRng(spec.rng_seed).split(kTrimStream);
      if (on.size() > want) {
        shuffle(on, trim);
        for (std::size_t i = want; i < on.size(); ++i) state.target_layer[on[i]] = 0.0;
      } else if (on.size() < want) {
        shuffle(off, trim);
        for (std::size_t i = 0; i < want - on.size(); ++i) state.target_layer[off[i]] = 1.0;
      }
    }
    state.initial_total = state.remaining_total();
    if (!(state.initial_total > 0.0)) {
      // Every drawn shape fell on tall buildings; fall back to one eligible cell so
      // the episode has a defined coverage ratio.
      for (int y = 0; y < g && state.initial_total == 0.0; ++y)
        for (int x = 0; x < g && state.initial_total == 0.0; ++x)
          if (eligible({x, y})) {
            state.target_layer[{x, y}] = 1.0;
            state.initial_total = 1.0;
          }
    }
    return state;
  }

  std::vector<Coord> open_cells;
  for (int y = 0; y < g; ++y)
    for (int x = 0; x < g; ++x)
      if (!is_building(map.at({x, y})) && !is_landing(map.at({x, y}))) open_cells.push_back({x, y});
  const auto k = static_cast<std::size_t>(spec.device_count);
  if (k > open_cells.size())
    throw std::invalid_argument("scenario: " + std::to_string(k) + " devices requested but only " +
                                std::to_string(open_cells.size()) + " open_cells cells");
  CounterRng rng = CounterRng(spec.rng_seed).split(kDeviceStream);
  // Partial Fisher-Yates: the first k entries become the device cells.
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(open_cells.size()) - 1));
    std::swap(open_cells[i], open_cells[j]);
  }
  state.devices.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double data = rng.uniform(spec.device_data.lo, spec.device_data.hi);
    state.devices.push_back({open_cells[i], data, data, 0.0});
    state.target_layer[open_cells[i]] = data;
    state.initial_total += data;
  }
  if (!(state.initial_total > 0.0)) throw std::invalid_argument("scenario: devices hold no data");
  return state;
}

Launch draw_launch(const EnvironmentMap& map, const ScenarioSpec& spec) {
  spec.validate();
  CounterRng rng = CounterRng(spec.rng_seed).split(kLaunchStream);
  const auto& pads = map.landing_cells();
  Launch l;
  l.start = pads[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pads.size()) - 1))];
  l.movement_budget = static_cast<int>(rng.uniform_int(spec.movement_budget.lo, spec.movement_budget.hi));
  return l;
}

}  // namespace ardq
