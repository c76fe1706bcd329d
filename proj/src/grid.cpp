#include "ttlab/grid.hpp"

#include <deque>

#include "ttlab/errors.hpp"

namespace ttlab {

std::optional<std::vector<Direction>> bfs_shortest_path(const Grid& grid,
                                                        Position from, Position to,
                                                        const CellPredicate& passable) {
  if (!grid.in_bounds(from) || !grid.in_bounds(to))
    throw ContractError("bfs_shortest_path: endpoint out of bounds");
  if (from == to) return std::vector<Direction>{};

  const int n = grid.width() * grid.height();
  auto idx = [&](Position p) { return p.row * grid.width() + p.col; };

  std::vector<int> parent(n, -1);        // index of predecessor cell
  std::vector<Direction> arrived_by(n, Direction::Up);
  std::vector<bool> seen(n, false);
  seen[idx(from)] = true;

  std::deque<Position> frontier{from};
  while (!frontier.empty()) {
    const Position cur = frontier.front();
    frontier.pop_front();
    for (Direction d : kAllDirections) {
      const Position next = offset(cur, d);
      if (!grid.in_bounds(next) || seen[idx(next)]) continue;
      if (!passable(grid.at(next))) continue;
      seen[idx(next)] = true;
      parent[idx(next)] = idx(cur);
      arrived_by[idx(next)] = d;
      if (next == to) {
        std::vector<Direction> path;
        int at = idx(next);
        while (at != idx(from)) {
          path.push_back(arrived_by[at]);
          at = parent[at];
        }
        return std::vector<Direction>(path.rbegin(), path.rend());
      }
      frontier.push_back(next);
    }
  }
  return std::nullopt;
}

std::optional<std::pair<Position, CellType>> raycast(const Grid& grid,
                                                     Position origin, Direction dir) {
  if (!grid.in_bounds(origin)) throw ContractError("raycast: origin out of bounds");
  Position p = offset(origin, dir);
  while (grid.in_bounds(p)) {
    const CellType c = grid.at(p);
    if (c != CellType::Empty && c != CellType::Heart) return std::make_pair(p, c);
    p = offset(p, dir);
  }
  return std::nullopt;
}

std::vector<double> encode_observation(const Grid& grid, Position agent,
                                       const std::vector<double>& flags) {
  for (double f : flags)
    if (!(f >= 0.0 && f <= 1.0))
      throw ContractError("encode_observation: flag outside [0, 1]");
  if (!grid.in_bounds(agent))
    throw ContractError("encode_observation: agent out of bounds");

  constexpr int kChannels = kCellTypeCount + 1;
  std::vector<double> out(static_cast<std::size_t>(grid.width()) * grid.height() * kChannels +
                              flags.size(),
                          0.0);
  std::size_t base = 0;
  for (int row = 0; row < grid.height(); ++row) {
    for (int col = 0; col < grid.width(); ++col) {
      const Position p{col, row};
      out[base + static_cast<int>(grid.at(p))] = 1.0;
      if (p == agent) out[base + kCellTypeCount] = 1.0;
      base += kChannels;
    }
  }
  for (std::size_t i = 0; i < flags.size(); ++i) out[base + i] = flags[i];
  return out;
}

}  // namespace ttlab
