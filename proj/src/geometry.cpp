#include "ardq/geometry.hpp"

namespace ardq {

std::vector<Coord> segment_cells(Coord from, Coord to) {
  std::vector<Coord> cells;
  walk_segment(from, to, [&](Coord c) {
    cells.push_back(c);
    return true;
  });
  return cells;
}

}  // namespace ardq
