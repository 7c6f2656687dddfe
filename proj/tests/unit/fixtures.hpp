#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ardq/world.hpp"

namespace ardq::testing {

/// Builds a map from rows written north-first, as in the file format.
inline EnvironmentMap map_from_rows(const std::vector<std::string>& rows, double cell = 10.0, double height = 25.0) {
  std::string text = "GRID " + std::to_string(rows.size()) + " " + std::to_string(cell) + " " +
                     std::to_string(height) + "\n";
  for (const auto& r : rows) text += r + "\n";
  return load_map(text);
}

inline std::shared_ptr<const EnvironmentMap> shared_map(const std::vector<std::string>& rows) {
  return std::make_shared<const EnvironmentMap>(map_from_rows(rows));
}

/// Open G x G map with a single landing cell in the south-west corner.
inline EnvironmentMap open_map(int g) {
  std::vector<std::string> rows(static_cast<std::size_t>(g), std::string(static_cast<std::size_t>(g), '.'));
  rows.back()[0] = 'L';
  return map_from_rows(rows);
}

}  // namespace ardq::testing
