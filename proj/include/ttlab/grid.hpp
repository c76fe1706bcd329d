#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace ttlab {

struct Position {
  int col = 0;
  int row = 0;

  bool operator==(const Position&) const = default;
};

enum class Direction : int { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr Direction kAllDirections[4] = {Direction::Up, Direction::Down,
                                                Direction::Left, Direction::Right};

inline Position offset(Position p, Direction d) {
  switch (d) {
    case Direction::Up: return {p.col, p.row - 1};
    case Direction::Down: return {p.col, p.row + 1};
    case Direction::Left: return {p.col - 1, p.row};
    case Direction::Right: return {p.col + 1, p.row};
  }
  return p;
}

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::Up: return "up";
    case Direction::Down: return "down";
    case Direction::Left: return "left";
    case Direction::Right: return "right";
  }
  return "?";
}

// One integer code per object type; codes are stable across runs and are the
// basis of both observation encoding and checkpointed state keys.
enum class CellType : std::uint8_t {
  Empty = 0,
  Wall = 1,
  Ice = 2,
  Shopkeeper = 3,
  Generator = 4,
  Pot = 5,
  Rupee = 6,
  Heart = 7,
};

inline constexpr int kCellTypeCount = 8;

inline char render_char(CellType c) {
  switch (c) {
    case CellType::Empty: return '.';
    case CellType::Wall: return '#';
    case CellType::Ice: return 'I';
    case CellType::Shopkeeper: return 'S';
    case CellType::Generator: return 'G';
    case CellType::Pot: return 'P';
    case CellType::Rupee: return 'R';
    case CellType::Heart: return 'H';
  }
  return '?';
}

class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, CellType fill = CellType::Empty)
      : width_(width), height_(height),
        cells_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(Position p) const {
    return p.col >= 0 && p.col < width_ && p.row >= 0 && p.row < height_;
  }

  CellType at(Position p) const { return cells_[index(p)]; }
  void set(Position p, CellType c) { cells_[index(p)] = c; }

  const std::vector<CellType>& cells() const { return cells_; }

  // First cell of the given type in row-major order, if any.
  std::optional<Position> find(CellType c) const {
    for (int row = 0; row < height_; ++row)
      for (int col = 0; col < width_; ++col)
        if (at({col, row}) == c) return Position{col, row};
    return std::nullopt;
  }

  int count(CellType c) const {
    int n = 0;
    for (CellType cell : cells_)
      if (cell == c) ++n;
    return n;
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t index(Position p) const {
    return static_cast<std::size_t>(p.row) * width_ + p.col;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<CellType> cells_;
};

using CellPredicate = std::function<bool(CellType)>;

// Minimum-length move sequence from `from` to `to` through cells satisfying
// `passable`, or nullopt if unreachable. `from` itself is never tested.
// Neighbor expansion order is Up, Down, Left, Right, which fixes the path
// among equals.
std::optional<std::vector<Direction>> bfs_shortest_path(const Grid& grid,
                                                        Position from, Position to,
                                                        const CellPredicate& passable);

// First non-Empty, non-Heart cell on the ray from origin (exclusive) along
// dir, or nullopt if the ray leaves the grid. Projectiles pass over hearts.
std::optional<std::pair<Position, CellType>> raycast(const Grid& grid,
                                                     Position origin, Direction dir);

// One-hot encoding over the 8 cell codes plus a 9th agent channel, row-major
// over cells with the 9 channels contiguous per cell, followed by the flags.
// Flags must each lie in [0, 1].
std::vector<double> encode_observation(const Grid& grid, Position agent,
                                       const std::vector<double>& flags);

inline int observation_size(const Grid& grid, int flag_count) {
  return grid.width() * grid.height() * (kCellTypeCount + 1) + flag_count;
}

}  // namespace ttlab
