#pragma once

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ardq {

/// Integer cell coordinates. x grows east, y grows north.
struct Coord {
  int x = 0;
  int y = 0;
  friend constexpr auto operator<=>(const Coord&, const Coord&) = default;
};

/// Square G x G array addressed by Coord.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int size, T fill) : size_(size), data_(static_cast<std::size_t>(size) * size, fill) {
    if (size <= 0) throw std::invalid_argument("Grid: size must be positive");
  }

  int size() const { return size_; }
  bool contains(Coord c) const { return c.x >= 0 && c.y >= 0 && c.x < size_ && c.y < size_; }

  T& operator[](Coord c) { return data_[index(c)]; }
  const T& operator[](Coord c) const { return data_[index(c)]; }

  const std::vector<T>& values() const { return data_; }
  std::vector<T>& values() { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(Coord c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(c.x);
  }

  int size_ = 0;
  std::vector<T> data_;
};

}  // namespace ardq
