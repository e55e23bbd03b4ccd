#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <queue>

#include "test_util.hpp"
#include "tidyplan/nav.hpp"

using namespace tidyplan;

namespace {

// Independent oracle: Dijkstra with unit weights over free cells, same
// endpoint convention (blocked endpoints enter/leave through an adjacent
// free cell at cost one).
int dijkstra_oracle(const GridMap& m, Cell from, Cell to) {
  if (from == to) return 0;
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> dist(m.cells.size(), inf);
  using Item = std::pair<int, int>;  // (dist, idx)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  auto seed = [&](Cell c, int d) {
    if (dist[m.idx(c)] > d) {
      dist[m.idx(c)] = d;
      pq.push({d, static_cast<int>(m.idx(c))});
    }
  };
  if (m.is_free(from)) {
    seed(from, 0);
  } else {
    for (Cell d : nav::neighbor_offsets()) {
      Cell n{from.x + d.x, from.y + d.y};
      if (m.is_free(n)) seed(n, 1);
    }
  }
  while (!pq.empty()) {
    auto [d, i] = pq.top();
    pq.pop();
    if (d > dist[static_cast<size_t>(i)]) continue;
    Cell c{i % m.width, i / m.width};
    for (Cell o : nav::neighbor_offsets()) {
      Cell n{c.x + o.x, c.y + o.y};
      if (m.is_free(n) && dist[m.idx(n)] > d + 1) {
        dist[m.idx(n)] = d + 1;
        pq.push({d + 1, static_cast<int>(m.idx(n))});
      }
    }
  }
  if (m.is_free(to)) return dist[m.idx(to)] == inf ? -1 : dist[m.idx(to)];
  int best = inf;
  for (Cell d : nav::neighbor_offsets()) {
    Cell n{to.x + d.x, to.y + d.y};
    if (m.is_free(n) && dist[m.idx(n)] != inf) best = std::min(best, dist[m.idx(n)] + 1);
  }
  return best == inf ? -1 : best;
}

}  // namespace

TEST_CASE("identical endpoints have zero length") {
  auto m = test::map_from_ascii({"....", "....", "....", "...."});
  auto p = nav::shortest_path(m, {1, 1}, {1, 1});
  CHECK(p.reachable);
  CHECK(p.length == 0);
  CHECK(p.cells.size() == 1);
}

TEST_CASE("straight corridor with seven intermediate cells costs eight") {
  auto m = test::map_from_ascii({
      "###########",
      "#.........#",
      "###########",
      "###########",
  });
  auto p = nav::shortest_path(m, {1, 1}, {9, 1});  // 7 cells strictly between
  CHECK(p.reachable);
  CHECK(p.length == 8);
  CHECK(static_cast<int>(p.cells.size()) == p.length + 1);
}

TEST_CASE("blocked target is reached through an adjacent free cell") {
  auto m = test::map_from_ascii({
      "......",
      "..s...",
      "......",
      "......",
  });
  // agent right next to the surface cell
  auto p = nav::shortest_path(m, {1, 1}, {2, 1});
  CHECK(p.reachable);
  CHECK(p.length == 1);
  // far route must agree with the oracle
  auto q = nav::shortest_path(m, {5, 1}, {2, 1});
  CHECK(q.reachable);
  CHECK(q.length == dijkstra_oracle(m, {5, 1}, {2, 1}));
}

TEST_CASE("walls make cells unreachable") {
  auto m = test::map_from_ascii({
      "...#..",
      "...#..",
      "...#..",
      "...#..",
  });
  auto p = nav::shortest_path(m, {0, 0}, {5, 0});
  CHECK(!p.reachable);
  CHECK(p.length == -1);
}

TEST_CASE("bfs equals dijkstra oracle on random maps") {
  Rng rng(42);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto m = test::random_map(rng, 12 + static_cast<int>(rng.index(10)),
                              12 + static_cast<int>(rng.index(10)), 0.25, 0.1);
    for (int pair = 0; pair < 20; ++pair) {
      Cell a{rng.uniform_int(0, m.width - 1), rng.uniform_int(0, m.height - 1)};
      Cell b{rng.uniform_int(0, m.width - 1), rng.uniform_int(0, m.height - 1)};
      auto p = nav::shortest_path(m, a, b);
      int want = dijkstra_oracle(m, a, b);
      CHECK(p.length == want);
      CHECK(p.reachable == (want >= 0));
      if (p.reachable) {
        CHECK(static_cast<int>(p.cells.size()) == p.length + 1);
        for (size_t i = 0; i + 1 < p.cells.size(); ++i) {
          int manh = std::abs(p.cells[i].x - p.cells[i + 1].x) +
                     std::abs(p.cells[i].y - p.cells[i + 1].y);
          CHECK(manh == 1);
        }
        for (size_t i = 1; i + 1 < p.cells.size(); ++i) CHECK(m.is_free(p.cells[i]));
      }
      ++checked;
    }
  }
  CHECK(checked == 2000);
}

TEST_CASE("length is symmetric") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    auto m = test::random_map(rng, 14, 14, 0.2, 0.1);
    for (int pair = 0; pair < 10; ++pair) {
      Cell a{rng.uniform_int(0, 13), rng.uniform_int(0, 13)};
      Cell b{rng.uniform_int(0, 13), rng.uniform_int(0, 13)};
      CHECK(nav::distance(m, a, b) == nav::distance(m, b, a));
    }
  }
}

TEST_CASE("triangle inequality holds for reachable triples") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto m = test::random_map(rng, 12, 12, 0.15);
    Cell a{rng.uniform_int(0, 11), rng.uniform_int(0, 11)};
    Cell b{rng.uniform_int(0, 11), rng.uniform_int(0, 11)};
    Cell c{rng.uniform_int(0, 11), rng.uniform_int(0, 11)};
    int ab = nav::distance(m, a, b), bc = nav::distance(m, b, c), ac = nav::distance(m, a, c);
    if (ab >= 0 && bc >= 0 && ac >= 0) CHECK(ac <= ab + bc);
  }
}

TEST_CASE("removing a wall never lengthens a path") {
  Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    auto m = test::random_map(rng, 12, 12, 0.3);
    std::vector<Cell> walls;
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 12; ++x)
        if (m.tag({x, y}) == CellTag::wall) walls.push_back({x, y});
    if (walls.empty()) continue;
    Cell a{rng.uniform_int(0, 11), rng.uniform_int(0, 11)};
    Cell b{rng.uniform_int(0, 11), rng.uniform_int(0, 11)};
    int before = nav::distance(m, a, b);
    GridMap relaxed = m;
    relaxed.set(walls[rng.index(walls.size())], CellTag::free_floor);
    int after = nav::distance(relaxed, a, b);
    if (before >= 0) {
      CHECK(after >= 0);
      CHECK(after <= before);
    }
  }
}

TEST_CASE("line of sight blocked by walls only") {
  auto m = test::map_from_ascii({
      ".....",
      "..#..",
      ".....",
      "..s..",
      ".....",
  });
  CHECK(!nav::line_unobstructed(m, {0, 1}, {4, 1}));  // wall in the way
  CHECK(nav::line_unobstructed(m, {0, 3}, {4, 3}));   // surface does not block
  CHECK(nav::line_unobstructed(m, {0, 0}, {4, 0}));
  CHECK(!nav::line_unobstructed(m, {2, 0}, {2, 2}));  // through the wall
  CHECK(nav::line_unobstructed(m, {0, 0}, {0, 4}));
}
