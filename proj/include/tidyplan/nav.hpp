#pragma once

#include <vector>

#include "tidyplan/core.hpp"
#include "tidyplan/gridmap.hpp"

namespace tidyplan {
namespace nav {

struct PathResult {
  int length = -1;          // cells; -1 when unreachable
  std::vector<Cell> cells;  // from .. to inclusive; interior cells are free floor
  bool reachable = false;
};

// BFS-optimal 4-connected path over free floor cells. Non-floor endpoints
// (objects on receptacles, receptacle centroids) are reached through an
// adjacent free cell; that final adjacency counts one cell of length and the
// endpoint itself is kept in the cell list.
PathResult shortest_path(const GridMap& map, Cell from, Cell to);

// Distance only; -1 when unreachable.
int distance(const GridMap& map, Cell from, Cell to);

// True when no wall cell lies on the straight segment between the two cell
// centers. Receptacle cells do not block sight.
bool line_unobstructed(const GridMap& map, Cell from, Cell to);

inline const std::vector<Cell>& neighbor_offsets() {
  static const std::vector<Cell> k{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  return k;
}

}  // namespace nav
}  // namespace tidyplan
