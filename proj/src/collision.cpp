#include "tidyplan/collision.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tidyplan/perception.hpp"

namespace tidyplan {
namespace collision {

CollisionCase classify_pair(int id_i, const Rect& box_i, const Rect& goal_i,
                            int id_j, const Rect& box_j, const Rect& goal_j) {
  bool cond_a = box_i.intersects(goal_j);
  bool cond_b = goal_i.intersects(box_j);
  CollisionCase c;
  if (cond_a && cond_b) {
    c.kind = CaseKind::swap;
    c.swap_i = std::min(id_i, id_j);
    c.swap_j = std::max(id_i, id_j);
  } else if (cond_a) {
    c.kind = CaseKind::blocked_goal;
    c.blocked_id = id_j;
    c.blocker_id = id_i;
  } else if (cond_b) {
    c.kind = CaseKind::blocked_goal;
    c.blocked_id = id_i;
    c.blocker_id = id_j;
  }
  return c;
}

namespace {

bool box_feasible(Cell p, int w, int h, const Rect& target, const GridMap& map,
                  const FreeMask& free_mask) {
  Rect placed{p, w, h};
  if (p.x < 0 || p.y < 0 || p.x + w > map.width || p.y + h > map.height) return false;
  if (placed.intersects(target)) return false;
  for (Cell c : placed.cells())
    if (!free_mask[map.idx(c)]) return false;
  return true;
}

double euclidean(Cell a, Cell b) {
  double dx = a.x - b.x;
  double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

double cem_objective(Cell p, int moving_w, int moving_h, const Rect& target,
                     const GridMap& map, const FreeMask& free_mask) {
  if (!box_feasible(p, moving_w, moving_h, target, map, free_mask)) return 0.0;
  return std::exp(-euclidean(p, target.origin));
}

Cell cem_search(int moving_w, int moving_h, const Rect& target, const GridMap& map,
                const FreeMask& free_mask, const CemParams& params, Rng& rng) {
  if (params.elites < 1 || params.elites > params.samples || params.iterations < 1)
    throw PlanError(Err::degenerate_input, "cem_search: bad params");

  std::vector<Cell> free_cells;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (free_mask[map.idx({x, y})]) free_cells.push_back({x, y});

  auto exhaustive_best = [&]() -> std::optional<Cell> {
    double best = 0.0;
    std::optional<Cell> best_cell;
    for (Cell c : free_cells) {
      double f = cem_objective(c, moving_w, moving_h, target, map, free_mask);
      if (f > best) {
        best = f;
        best_cell = c;
      }
    }
    return best_cell;
  };

  if (free_cells.empty()) throw PlanError(Err::no_feasible_cell, "cem_search: no free placement cells");

  Cell best_cell{};
  double best_score = 0.0;
  // First batch uniform over free placement cells, then Gaussian refits
  // around the elites; samples round to the nearest in-bounds cell. A
  // quarter of each later batch stays uniform and the best-ever sample
  // joins each refit, keeping the fit from collapsing onto an infeasible
  // region when feasible cells are scattered.
  double mu_x = 0, mu_y = 0, sd_x = 0, sd_y = 0;
  bool have_gaussian = false;
  const int explore = std::max(1, params.samples / 4);

  std::vector<std::pair<double, Cell>> scored;
  for (int it = 0; it < params.iterations; ++it) {
    scored.clear();
    for (int k = 0; k < params.samples; ++k) {
      Cell p;
      if (!have_gaussian || k < explore) {
        p = free_cells[rng.index(free_cells.size())];
      } else {
        double gx = rng.gaussian(mu_x, sd_x);
        double gy = rng.gaussian(mu_y, sd_y);
        p.x = std::clamp(static_cast<int>(std::lround(gx)), 0, map.width - 1);
        p.y = std::clamp(static_cast<int>(std::lround(gy)), 0, map.height - 1);
      }
      double f = cem_objective(p, moving_w, moving_h, target, map, free_mask);
      scored.push_back({f, p});
      if (f > best_score) {
        best_score = f;
        best_cell = p;
      }
    }
    if (best_score > 0.0) scored.push_back({best_score, best_cell});
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    int m = params.elites;
    double sx = 0, sy = 0, sxx = 0, syy = 0;
    int used = 0;
    for (int k = 0; k < m; ++k) {
      if (scored[static_cast<size_t>(k)].first <= 0.0) break;
      Cell c = scored[static_cast<size_t>(k)].second;
      sx += c.x;
      sy += c.y;
      sxx += static_cast<double>(c.x) * c.x;
      syy += static_cast<double>(c.y) * c.y;
      ++used;
    }
    if (used > 0) {
      mu_x = sx / used;
      mu_y = sy / used;
      sd_x = std::max(params.std_floor, std::sqrt(std::max(0.0, sxx / used - mu_x * mu_x)));
      sd_y = std::max(params.std_floor, std::sqrt(std::max(0.0, syy / used - mu_y * mu_y)));
      have_gaussian = true;
    } else {
      have_gaussian = false;  // nothing feasible yet, keep sampling uniformly
    }
  }

  if (best_score > 0.0) return best_cell;
  auto scan = exhaustive_best();
  if (scan) return *scan;
  throw PlanError(Err::no_feasible_cell, "cem_search: no feasible buffer cell");
}

namespace {

void mask_rect(FreeMask& mask, const GridMap& map, const Rect& r) {
  for (Cell c : r.cells())
    if (map.in_bounds(c)) mask[map.idx(c)] = 0;
}

}  // namespace

void resolve_collisions(percep::Knowledge& k, const Scenario& s, const CemParams& params, Rng& rng) {
  k.resolved_goals.clear();

  std::vector<int> vis;
  for (const auto& [id, pos] : k.visible) vis.push_back(id);

  auto box_of = [&](int id) {
    const auto& o = s.objects[static_cast<size_t>(id)];
    return Rect{k.visible.at(id), o.fw, o.fh};
  };

  std::vector<std::pair<int, int>> swaps;
  std::map<int, int> blocked_by;  // blocked id -> blocker id
  for (size_t a = 0; a < vis.size(); ++a)
    for (size_t b = a + 1; b < vis.size(); ++b) {
      int i = vis[a], j = vis[b];
      const auto& oi = s.objects[static_cast<size_t>(i)];
      const auto& oj = s.objects[static_cast<size_t>(j)];
      auto c = classify_pair(i, box_of(i), oi.goal_box(), j, box_of(j), oj.goal_box());
      if (c.kind == CaseKind::swap) swaps.push_back({c.swap_i, c.swap_j});
      else if (c.kind == CaseKind::blocked_goal) blocked_by.emplace(c.blocked_id, c.blocker_id);
    }

  std::vector<Rect> committed_buffers;
  auto find_buffer = [&](int mover, int partner, const Rect& avoid_goal) {
    const auto& om = s.objects[static_cast<size_t>(mover)];
    FreeMask free = k.free_map;
    mask_rect(free, s.grid, avoid_goal);
    for (const Rect& b : committed_buffers) mask_rect(free, s.grid, b);
    Rect target = box_of(partner);
    Cell buf = cem_search(om.fw, om.fh, target, s.grid, free, params, rng);
    committed_buffers.push_back(Rect{buf, om.fw, om.fh});
    return buf;
  };

  for (auto [i, j] : swaps) {
    const auto& oj = s.objects[static_cast<size_t>(j)];
    const auto& oi = s.objects[static_cast<size_t>(i)];
    k.resolved_goals[i] = find_buffer(i, j, oj.goal_box());
    k.resolved_goals[j] = find_buffer(j, i, oi.goal_box());
  }
  for (const auto& [blocked, blocker] : blocked_by) {
    if (k.resolved_goals.count(blocked)) continue;  // a swap buffer already moves it away
    k.resolved_goals[blocked] = k.visible.at(blocked);
  }

  // pin cycle with nothing else to do: free the lowest id with a buffer
  size_t searchable = 0;
  for (int id : k.unseen)
    if (!k.unfindable.count(id)) ++searchable;
  if (searchable == 0) {
    std::vector<int> pinned_misplaced;
    bool any_movable = false;
    for (int id : vis) {
      const auto& o = s.objects[static_cast<size_t>(id)];
      if (k.visible.at(id) == o.goal_pos) continue;  // already tidy
      auto it = k.resolved_goals.find(id);
      if (it != k.resolved_goals.end() && it->second == k.visible.at(id))
        pinned_misplaced.push_back(id);
      else
        any_movable = true;
    }
    if (!any_movable && !pinned_misplaced.empty()) {
      int id = *std::min_element(pinned_misplaced.begin(), pinned_misplaced.end());
      int blocker = blocked_by.at(id);
      FreeMask free = k.free_map;
      for (int other : vis) {
        const auto& oo = s.objects[static_cast<size_t>(other)];
        if (k.visible.at(other) != oo.goal_pos) mask_rect(free, s.grid, oo.goal_box());
      }
      const auto& o = s.objects[static_cast<size_t>(id)];
      Cell buf = cem_search(o.fw, o.fh, box_of(blocker), s.grid, free, params, rng);
      k.resolved_goals[id] = buf;
    }
  }
}

}  // namespace collision
}  // namespace tidyplan
