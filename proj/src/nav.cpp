#include "tidyplan/nav.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>

namespace tidyplan {
namespace nav {

namespace {

constexpr int kUnvisited = -1;

}  // namespace

PathResult shortest_path(const GridMap& map, Cell from, Cell to) {
  PathResult res;
  if (!map.in_bounds(from) || !map.in_bounds(to))
    throw PlanError(Err::degenerate_input, "shortest_path: endpoint out of bounds");

  if (from == to) {
    res.length = 0;
    res.cells = {from};
    res.reachable = true;
    return res;
  }

  const size_t n = map.cells.size();
  std::vector<int> dist(n, kUnvisited);
  std::vector<int> prev(n, -1);
  std::queue<Cell> queue;

  auto push = [&](Cell c, int d, int from_idx) {
    size_t i = map.idx(c);
    if (dist[i] != kUnvisited) return;
    dist[i] = d;
    prev[i] = from_idx;
    queue.push(c);
  };

  const bool from_free = map.is_free(from);
  const bool to_free = map.is_free(to);

  if (from_free) {
    push(from, 0, -1);
  } else {
    // Start on the free cells bordering the blocked origin; one step each.
    for (Cell d : neighbor_offsets()) {
      Cell c{from.x + d.x, from.y + d.y};
      if (map.is_free(c)) push(c, 1, -1);
    }
  }

  auto finish = [&](Cell last_free, int extra) {
    res.reachable = true;
    res.length = dist[map.idx(last_free)] + extra;
    std::vector<Cell> back;
    for (int i = static_cast<int>(map.idx(last_free)); i != -1; i = prev[static_cast<size_t>(i)])
      back.push_back({i % map.width, i / map.width});
    std::reverse(back.begin(), back.end());
    res.cells.clear();
    if (!from_free) res.cells.push_back(from);
    res.cells.insert(res.cells.end(), back.begin(), back.end());
    if (extra > 0) res.cells.push_back(to);
    return res;
  };

  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop();
    size_t ci = map.idx(c);
    if (to_free && c == to) return finish(c, 0);
    if (!to_free && std::abs(c.x - to.x) + std::abs(c.y - to.y) == 1) return finish(c, 1);
    for (Cell d : neighbor_offsets()) {
      Cell nxt{c.x + d.x, c.y + d.y};
      if (map.is_free(nxt)) push(nxt, dist[ci] + 1, static_cast<int>(ci));
    }
  }
  return res;  // unreachable
}

int distance(const GridMap& map, Cell from, Cell to) {
  return shortest_path(map, from, to).length;
}

bool line_unobstructed(const GridMap& map, Cell from, Cell to) {
  // Integer supercover walk between cell centers; a wall anywhere on the
  // segment (endpoints excluded) blocks it.
  int x0 = from.x, y0 = from.y, x1 = to.x, y1 = to.y;
  int dx = std::abs(x1 - x0), dy = std::abs(y1 - y0);
  int sx = x0 < x1 ? 1 : -1;
  int sy = y0 < y1 ? 1 : -1;
  int err = dx - dy;
  int x = x0, y = y0;
  while (!(x == x1 && y == y1)) {
    int e2 = 2 * err;
    if (e2 > -dy) {
      err -= dy;
      x += sx;
    }
    if (e2 < dx) {
      err += dx;
      y += sy;
    }
    if (x == x1 && y == y1) break;
    if (map.in_bounds({x, y}) && map.tag({x, y}) == CellTag::wall) return false;
  }
  return true;
}

}  // namespace nav
}  // namespace tidyplan
