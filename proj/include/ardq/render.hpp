#pragma once

#include <string>
#include <vector>

#include "ardq/missions.hpp"
#include "ardq/world.hpp"

namespace ardq {

struct Rgb {
  unsigned char r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Raster of the map with north at the top, `scale` pixels per cell.
class Image {
 public:
  Image(int width, int height, Rgb fill = {255, 255, 255});

  int width() const { return w_; }
  int height() const { return h_; }
  Rgb at(int px, int py) const { return pixels_[static_cast<std::size_t>(py) * w_ + px]; }
  void set(int px, int py, Rgb c);
  void fill_rect(int px, int py, int w, int h, Rgb c);
  void line(int x0, int y0, int x1, int y1, Rgb c);

  /// Binary PPM (P6).
  std::string ppm() const;

 private:
  int w_, h_;
  std::vector<Rgb> pixels_;
};

inline constexpr Rgb kPathColor{0, 0, 0};

/// Landing blue, no-fly red, tall dark gray, small gray, remaining targets green
/// (intensity proportional to the value), devices as orange squares (purple once
/// drained), path as a black polyline with a mark at every visited cell center.
Image render_trajectory(const EnvironmentMap& map, const MissionState& state, const std::vector<Coord>& path,
                        int scale = 8);

}  // namespace ardq
