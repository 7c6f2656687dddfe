#include "ardq/world.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ardq/rng.hpp"

namespace ardq {

char cell_char(Cell c) {
  switch (c) {
    case Cell::Free: return '.';
    case Cell::Landing: return 'L';
    case Cell::NoFly: return 'N';
    case Cell::TallBuilding: return 'T';
    case Cell::SmallBuilding: return 'S';
  }
  return '?';
}

EnvironmentMap::EnvironmentMap(Grid<Cell> cells, double cell_size_m, double uav_height_m)
    : cells_(std::move(cells)), cell_size_m_(cell_size_m), uav_height_m_(uav_height_m) {
  if (cells_.size() < 4) throw std::invalid_argument("map: grid size must be at least 4");
  if (!(cell_size_m_ > 0.0) || !std::isfinite(cell_size_m_))
    throw std::invalid_argument("map: cell size must be positive");
  if (!(uav_height_m_ > 0.0) || !std::isfinite(uav_height_m_))
    throw std::invalid_argument("map: UAV height must be positive");
  for (int y = 0; y < size(); ++y)
    for (int x = 0; x < size(); ++x)
      if (is_landing(cells_[{x, y}])) landing_.push_back({x, y});
  if (landing_.empty()) throw std::invalid_argument("map: at least one landing cell is required");
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

template <typename T>
T parse_number(std::string_view token, int line, int column, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw MapError("line " + std::to_string(line) + ": bad " + what + " '" + std::string(token) + "'", line,
                   column);
  return value;
}

}  // namespace

EnvironmentMap load_map(std::string_view text) {
  auto lines = split_lines(text);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw MapError("empty map file", 1, 0);

  // Header: GRID <G> <cell_size_m> <height_m>
  std::vector<std::pair<std::string_view, int>> tokens;
  {
    std::string_view h = lines[0];
    std::size_t i = 0;
    while (i < h.size()) {
      while (i < h.size() && h[i] == ' ') ++i;
      std::size_t j = i;
      while (j < h.size() && h[j] != ' ') ++j;
      if (j > i) tokens.emplace_back(h.substr(i, j - i), static_cast<int>(i) + 1);
      i = j;
    }
  }
  if (tokens.size() != 4 || tokens[0].first != "GRID")
    throw MapError("line 1: expected 'GRID <G> <cell_size_m> <height_m>'", 1, 1);
  const int g = parse_number<int>(tokens[1].first, 1, tokens[1].second, "grid size");
  const double cell = parse_number<double>(tokens[2].first, 1, tokens[2].second, "cell size");
  const double height = parse_number<double>(tokens[3].first, 1, tokens[3].second, "height");
  if (g < 4) throw MapError("line 1: grid size must be at least 4", 1, tokens[1].second);
  if (static_cast<int>(lines.size()) - 1 != g)
    throw MapError("expected " + std::to_string(g) + " grid rows, found " + std::to_string(lines.size() - 1),
                   static_cast<int>(lines.size()), 0);

  Grid<Cell> cells(g, Cell::Free);
  for (int row = 0; row < g; ++row) {
    const std::string_view line = lines[static_cast<std::size_t>(row) + 1];
    const int line_no = row + 2;
    if (static_cast<int>(line.size()) != g)
      throw MapError("line " + std::to_string(line_no) + ": expected " + std::to_string(g) + " cells, found " +
                         std::to_string(line.size()),
                     line_no, static_cast<int>(std::min<std::size_t>(line.size(), static_cast<std::size_t>(g))) + 1);
    const int y = g - 1 - row;
    for (int x = 0; x < g; ++x) {
      Cell c;
      switch (line[static_cast<std::size_t>(x)]) {
        case '.': c = Cell::Free; break;
        case 'L': c = Cell::Landing; break;
        case 'N': c = Cell::NoFly; break;
        case 'T': c = Cell::TallBuilding; break;
        case 'S': c = Cell::SmallBuilding; break;
        default:
          throw MapError("line " + std::to_string(line_no) + ", column " + std::to_string(x + 1) +
                             ": unexpected character '" + std::string(1, line[static_cast<std::size_t>(x)]) + "'",
                         line_no, x + 1);
      }
      cells[{x, y}] = c;
    }
  }
  try {
    return EnvironmentMap(std::move(cells), cell, height);
  } catch (const std::invalid_argument& e) {
    throw MapError(e.what(), 1, 0);
  }
}

EnvironmentMap load_map_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return load_map(ss.str());
  } catch (const MapError& e) {
    throw MapError(path + ": " + e.what(), e.line(), e.column());
  }
}

std::string save_map(const EnvironmentMap& map) {
  auto shortest = [](double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
  };
  std::ostringstream out;
  out << "GRID " << map.size() << ' ' << shortest(map.cell_size_m()) << ' ' << shortest(map.uav_height_m()) << '\n';
  for (int y = map.size() - 1; y >= 0; --y) {
    for (int x = 0; x < map.size(); ++x) out << cell_char(map.at({x, y}));
    out << '\n';
  }
  return out.str();
}

EnvironmentMap generate_map(const MapGenSpec& spec) {
  if (spec.size < 4) throw std::invalid_argument("gen-map: size must be at least 4");
  if (spec.landing_zones < 1) throw std::invalid_argument("gen-map: need at least one landing zone");
  if (spec.max_block_size < 1 || spec.landing_zone_size < 1)
    throw std::invalid_argument("gen-map: block sizes must be positive");

  CounterRng rng(spec.seed);
  const int g = spec.size;
  Grid<Cell> cells(g, Cell::Free);

  auto paint = [&](Cell what, int count) {
    for (int i = 0; i < count; ++i) {
      const int w = static_cast<int>(rng.uniform_int(1, spec.max_block_size));
      const int h = static_cast<int>(rng.uniform_int(1, spec.max_block_size));
      const int x0 = static_cast<int>(rng.uniform_int(0, g - 1));
      const int y0 = static_cast<int>(rng.uniform_int(0, g - 1));
      for (int y = y0; y < std::min(g, y0 + h); ++y)
        for (int x = x0; x < std::min(g, x0 + w); ++x) cells[{x, y}] = what;
    }
  };
  paint(Cell::NoFly, spec.nfz_count);
  paint(Cell::SmallBuilding, spec.small_building_count);
  paint(Cell::TallBuilding, spec.tall_building_count);

  // Landing zones overwrite whatever was painted underneath.
  const int s = std::min(spec.landing_zone_size, g);
  for (int i = 0; i < spec.landing_zones; ++i) {
    const int x0 = static_cast<int>(rng.uniform_int(0, g - s));
    const int y0 = static_cast<int>(rng.uniform_int(0, g - s));
    for (int y = y0; y < y0 + s; ++y)
      for (int x = x0; x < x0 + s; ++x) cells[{x, y}] = Cell::Landing;
  }
  return EnvironmentMap(std::move(cells), spec.cell_size_m, spec.uav_height_m);
}

}  // namespace ardq
