#pragma once

#include <cstdlib>
#include <vector>

#include "ardq/grid.hpp"

namespace ardq {

/// Visits, in order, every cell whose interior the straight segment between
/// the centers of `from` and `to` passes through, excluding both endpoint
/// cells. Exact integer traversal: a segment that passes precisely through a
/// grid vertex steps diagonally and does not visit the two cells it only
/// touches at that point. Stops early and returns false as soon as `visit`
/// returns false.
template <typename Visit>
bool walk_segment(Coord from, Coord to, Visit&& visit) {
  const int ax = std::abs(to.x - from.x);
  const int ay = std::abs(to.y - from.y);
  const int sx = to.x > from.x ? 1 : -1;
  const int sy = to.y > from.y ? 1 : -1;
  int i = 0;  // vertical grid lines crossed so far
  int j = 0;  // horizontal grid lines crossed so far
  Coord c = from;
  while (i < ax || j < ay) {
    // Crossing i happens at t = (2i+1)/(2ax); compare by cross-multiplication.
    if (j >= ay) {
      c.x += sx;
      ++i;
    } else if (i >= ax) {
      c.y += sy;
      ++j;
    } else {
      const long long tx = static_cast<long long>(2 * i + 1) * ay;
      const long long ty = static_cast<long long>(2 * j + 1) * ax;
      if (tx < ty) {
        c.x += sx;
        ++i;
      } else if (ty < tx) {
        c.y += sy;
        ++j;
      } else {
        c.x += sx;
        c.y += sy;
        ++i;
        ++j;
      }
    }
    if (c != to && !visit(c)) return false;
  }
  return true;
}

/// True when no interior cell of the segment satisfies `blocked`.
template <typename Blocked>
bool segment_clear(Coord from, Coord to, Blocked&& blocked) {
  return walk_segment(from, to, [&](Coord c) { return !blocked(c); });
}

std::vector<Coord> segment_cells(Coord from, Coord to);

}  // namespace ardq
