#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ardq/grid.hpp"

namespace ardq {

/// Role of one map cell. Cells are single-role, so the flag combinations that
/// the environment model forbids (e.g. a landing cell inside a no-fly zone)
/// cannot be represented.
enum class Cell : std::uint8_t {
  Free,
  Landing,
  NoFly,
  TallBuilding,   // blocks flight and radio
  SmallBuilding,  // blocks radio only; the UAV may fly over it
};

constexpr bool is_landing(Cell c) { return c == Cell::Landing; }
constexpr bool is_nfz(Cell c) { return c == Cell::NoFly; }
constexpr bool is_tall_building(Cell c) { return c == Cell::TallBuilding; }
constexpr bool is_small_building(Cell c) { return c == Cell::SmallBuilding; }
/// Cells the UAV may never occupy.
constexpr bool no_occupy(Cell c) { return c == Cell::NoFly || c == Cell::TallBuilding; }
constexpr bool blocks_radio(Cell c) { return c == Cell::TallBuilding || c == Cell::SmallBuilding; }
/// Occluders for the down-looking camera.
constexpr bool blocks_camera(Cell c) { return c == Cell::TallBuilding; }
constexpr bool is_building(Cell c) { return blocks_radio(c); }

char cell_char(Cell c);

/// Raised for malformed map text. line/column are 1-based; column 0 means
/// the whole line.
class MapError : public std::runtime_error {
 public:
  MapError(const std::string& what, int line, int column)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Static G x G environment. Immutable after construction.
class EnvironmentMap {
 public:
  /// Validates the invariants (G >= 4, positive dimensions, >= 1 landing cell).
  EnvironmentMap(Grid<Cell> cells, double cell_size_m, double uav_height_m);

  int size() const { return cells_.size(); }
  double cell_size_m() const { return cell_size_m_; }
  double uav_height_m() const { return uav_height_m_; }
  bool contains(Coord c) const { return cells_.contains(c); }
  Cell at(Coord c) const { return cells_[c]; }
  const Grid<Cell>& cells() const { return cells_; }
  const std::vector<Coord>& landing_cells() const { return landing_; }

  friend bool operator==(const EnvironmentMap& a, const EnvironmentMap& b) {
    return a.cells_ == b.cells_ && a.cell_size_m_ == b.cell_size_m_ && a.uav_height_m_ == b.uav_height_m_;
  }

 private:
  Grid<Cell> cells_;
  double cell_size_m_;
  double uav_height_m_;
  std::vector<Coord> landing_;
};

/// Parses the text map format:
///   GRID <G> <cell_size_m> <height_m>
///   G lines of G characters from {. L N T S}, northernmost row first.
EnvironmentMap load_map(std::string_view text);
EnvironmentMap load_map_file(const std::string& path);
std::string save_map(const EnvironmentMap& map);

/// Parameters for random map synthesis (`gen-map`).
struct MapGenSpec {
  int size = 32;
  double cell_size_m = 10.0;
  double uav_height_m = 25.0;
  int landing_zones = 2;
  int landing_zone_size = 2;
  int nfz_count = 3;
  int tall_building_count = 10;
  int small_building_count = 8;
  int max_block_size = 5;
  std::uint64_t seed = 0;
};

EnvironmentMap generate_map(const MapGenSpec& spec);

}  // namespace ardq
