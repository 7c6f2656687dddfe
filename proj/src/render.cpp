#include "ardq/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace ardq {

Image::Image(int width, int height, Rgb fill) : w_(width), h_(height) {
  if (width < 1 || height < 1) throw std::invalid_argument("image: size must be positive");
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

void Image::set(int px, int py, Rgb c) {
  if (px >= 0 && py >= 0 && px < w_ && py < h_) pixels_[static_cast<std::size_t>(py) * w_ + px] = c;
}

void Image::fill_rect(int px, int py, int w, int h, Rgb c) {
  for (int y = py; y < py + h; ++y)
    for (int x = px; x < px + w; ++x) set(x, y, c);
}

void Image::line(int x0, int y0, int x1, int y1, Rgb c) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    set(x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

std::string Image::ppm() const {
  std::string out = "P6\n" + std::to_string(w_) + " " + std::to_string(h_) + "\n255\n";
  out.reserve(out.size() + pixels_.size() * 3);
  for (const Rgb& p : pixels_) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

namespace {

Rgb cell_color(Cell c) {
  switch (c) {
    case Cell::Landing: return {40, 90, 230};
    case Cell::NoFly: return {220, 40, 40};
    case Cell::TallBuilding: return {70, 70, 70};
    case Cell::SmallBuilding: return {160, 160, 160};
    case Cell::Free: break;
  }
  return {255, 255, 255};
}

Rgb blend(Rgb base, Rgb top, double w) {
  auto mix = [w](unsigned char a, unsigned char b) {
    return static_cast<unsigned char>(std::lround(a + (static_cast<int>(b) - a) * std::clamp(w, 0.0, 1.0)));
  };
  return {mix(base.r, top.r), mix(base.g, top.g), mix(base.b, top.b)};
}

}  // namespace

Image render_trajectory(const EnvironmentMap& map, const MissionState& state, const std::vector<Coord>& path,
                        int scale) {
  if (path.empty()) throw std::invalid_argument("render: trajectory is empty");
  if (scale < 1) throw std::invalid_argument("render: scale must be positive");
  const int g = map.size();
  Image img(g * scale, g * scale);
  auto top_left = [&](Coord c) { return std::pair{c.x * scale, (g - 1 - c.y) * scale}; };
  auto center = [&](Coord c) { return std::pair{c.x * scale + scale / 2, (g - 1 - c.y) * scale + scale / 2}; };

  double peak = 0.0;
  if (state.mission == MissionType::Cpp)
    for (double v : state.target_layer.values()) peak = std::max(peak, v);

  for (int y = 0; y < g; ++y)
    for (int x = 0; x < g; ++x) {
      const Coord c{x, y};
      Rgb color = cell_color(map.cells()[c]);
      if (state.mission == MissionType::Cpp && peak > 0.0 && state.target_layer[c] > 0.0)
        color = blend(color, {0, 190, 0}, state.target_layer[c] / peak);
      const auto [px, py] = top_left(c);
      img.fill_rect(px, py, scale, scale, color);
    }

  for (const DeviceState& d : state.devices) {
    const int side = std::max(1, scale / 2);
    const auto [cx, cy] = center(d.position);
    const Rgb color = d.remaining_data > 0.0 ? Rgb{255, 140, 0} : Rgb{150, 60, 200};
    img.fill_rect(cx - side / 2, cy - side / 2, side, side, color);
  }

  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto [x0, y0] = center(path[i - 1]);
    const auto [x1, y1] = center(path[i]);
    img.line(x0, y0, x1, y1, kPathColor);
  }
  const int mark = std::max(1, scale / 4);
  for (const Coord& c : path) {
    const auto [cx, cy] = center(c);
    img.fill_rect(cx - mark / 2, cy - mark / 2, mark, mark, kPathColor);
  }
  return img;
}

}  // namespace ardq
