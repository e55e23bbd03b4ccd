#include "tidyplan/generator.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "tidyplan/collision.hpp"
#include "tidyplan/nav.hpp"
#include "tidyplan/perception.hpp"
#include "tidyplan/vocab.hpp"

namespace tidyplan {
namespace grid {

namespace {

struct Retry : PlanError {
  using PlanError::PlanError;
};

void validate_config(const GenConfig& cfg) {
  if (cfg.n_objects <= 0) throw PlanError(Err::degenerate_input, "n_objects must be >= 1");
  if (cfg.width < 8 || cfg.height < 8)
    throw PlanError(Err::degenerate_input, "map too small for a 2x2 floorplan");
  if (cfg.n_swap % 2 != 0) throw PlanError(Err::degenerate_input, "n_swap must be even");
  if (cfg.n_objects > static_cast<int>(vocab::object_kinds().size()))
    throw PlanError(Err::capacity_exceeded, "more objects than the vocabulary supports");
  int n_visible = cfg.n_objects - cfg.n_partially_occluded - cfg.n_fully_occluded;
  if (n_visible < 0) throw PlanError(Err::degenerate_input, "occlusion counts exceed n_objects");
  if (cfg.n_swap + 2 * cfg.n_blocked_pairs > n_visible)
    throw PlanError(Err::degenerate_input, "collision cases need that many visible objects");
  if (cfg.n_shuffled >= 0) {
    int forced = cfg.n_partially_occluded + cfg.n_fully_occluded + cfg.n_swap + 2 * cfg.n_blocked_pairs;
    if (cfg.n_shuffled < forced)
      throw PlanError(Err::degenerate_input, "n_shuffled below the forced displacement count");
    if (cfg.n_shuffled > cfg.n_objects)
      throw PlanError(Err::degenerate_input, "n_shuffled exceeds n_objects");
  }
}

bool free_cells_connected(const GridMap& m) {
  size_t total = 0;
  Cell start{-1, -1};
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.is_free({x, y})) {
        ++total;
        if (start.x < 0) start = {x, y};
      }
  if (total == 0) return false;
  std::vector<uint8_t> vis(m.cells.size(), 0);
  std::queue<Cell> q;
  q.push(start);
  vis[m.idx(start)] = 1;
  size_t seen = 1;
  while (!q.empty()) {
    Cell c = q.front();
    q.pop();
    for (Cell d : nav::neighbor_offsets()) {
      Cell n{c.x + d.x, c.y + d.y};
      if (m.is_free(n) && !vis[m.idx(n)]) {
        vis[m.idx(n)] = 1;
        ++seen;
        q.push(n);
      }
    }
  }
  return seen == total;
}

bool has_adjacent_free(const GridMap& m, const std::vector<Cell>& cells) {
  for (Cell c : cells)
    for (Cell d : nav::neighbor_offsets())
      if (m.is_free({c.x + d.x, c.y + d.y})) return true;
  return false;
}

void build_floorplan(Scenario& s, const GenConfig& cfg, Rng& rng) {
  GridMap m = GridMap::blank(cfg.width, cfg.height, cfg.cell_size);
  int w = cfg.width, h = cfg.height;
  int xm = w / 2, ym = h / 2;
  for (int x = 0; x < w; ++x) {
    m.set({x, 0}, CellTag::wall);
    m.set({x, h - 1}, CellTag::wall);
    m.set({x, ym}, CellTag::wall);
  }
  for (int y = 0; y < h; ++y) {
    m.set({0, y}, CellTag::wall);
    m.set({w - 1, y}, CellTag::wall);
    m.set({xm, y}, CellTag::wall);
  }
  // one doorway per shared wall segment
  m.set({xm, rng.uniform_int(1, ym - 1)}, CellTag::free_floor);
  m.set({xm, rng.uniform_int(ym + 1, h - 2)}, CellTag::free_floor);
  m.set({rng.uniform_int(1, xm - 1), ym}, CellTag::free_floor);
  m.set({rng.uniform_int(xm + 1, w - 2), ym}, CellTag::free_floor);

  std::vector<RoomKind> kinds{RoomKind::living, RoomKind::bedroom, RoomKind::bathroom, RoomKind::kitchen};
  rng.shuffle(kinds);
  s.rooms = {
      {0, kinds[0], Rect{{1, 1}, xm - 1, ym - 1}},
      {1, kinds[1], Rect{{xm + 1, 1}, w - xm - 2, ym - 1}},
      {2, kinds[2], Rect{{1, ym + 1}, xm - 1, h - ym - 2}},
      {3, kinds[3], Rect{{xm + 1, ym + 1}, w - xm - 2, h - ym - 2}},
  };
  s.grid = std::move(m);
}

void place_receptacles(Scenario& s, Rng& rng) {
  s.receptacles.clear();
  int rid = 0;
  for (const auto& room : s.rooms) {
    for (const auto& kind : vocab::receptacle_kinds()) {
      if (kind.room != room.kind) continue;
      bool placed = false;
      for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
        if (room.region.w < kind.w || room.region.h < kind.h) break;
        Cell origin{room.region.origin.x + rng.uniform_int(0, room.region.w - kind.w),
                    room.region.origin.y + rng.uniform_int(0, room.region.h - kind.h)};
        Rect rect{origin, kind.w, kind.h};
        bool ok = true;
        for (Cell c : rect.cells()) {
          // keep one cell of clearance from other receptacles
          for (int dy = -1; dy <= 1 && ok; ++dy)
            for (int dx = -1; dx <= 1 && ok; ++dx) {
              Cell n{c.x + dx, c.y + dy};
              if (s.grid.in_bounds(n) && s.grid.is_receptacle_cell(n)) ok = false;
            }
          if (!s.grid.is_free(c)) ok = false;
          if (!ok) break;
        }
        if (!ok) continue;
        GridMap trial = s.grid;
        for (Cell c : rect.cells())
          trial.set(c, kind.openable ? CellTag::interior : CellTag::surface, static_cast<int16_t>(rid));
        if (!free_cells_connected(trial) || !has_adjacent_free(trial, rect.cells())) continue;
        s.grid = std::move(trial);
        Receptacle r;
        r.id = rid;
        r.label = kind.label;
        r.room_id = room.id;
        r.cells = rect.cells();
        r.openable = kind.openable;
        r.open = !kind.openable;  // openable receptacles start closed
        r.centroid = {origin.x + (kind.w - 1) / 2, origin.y + (kind.h - 1) / 2};
        s.receptacles.push_back(std::move(r));
        ++rid;
        placed = true;
      }
      if (!placed) throw Retry(Err::capacity_exceeded, "receptacle placement failed: " + kind.label);
    }
  }
}

std::vector<Cell> free_floor_cells(const GridMap& m) {
  std::vector<Cell> out;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.is_free({x, y})) out.push_back({x, y});
  return out;
}

// Feasible footprint origins on one receptacle, excluding taken boxes.
std::vector<Cell> feasible_origins(const Receptacle& r, int fw, int fh,
                                   const std::vector<Rect>& taken) {
  std::set<Cell> cellset(r.cells.begin(), r.cells.end());
  std::vector<Cell> out;
  for (Cell origin : r.cells) {
    bool ok = true;
    Rect box{origin, fw, fh};
    for (Cell c : box.cells())
      if (!cellset.count(c)) {
        ok = false;
        break;
      }
    for (const Rect& t : taken)
      if (ok && box.intersects(t)) ok = false;
    if (ok) out.push_back(origin);
  }
  return out;
}

int weighted_pick(Rng& rng, const std::vector<double>& weights) {
  double total = 0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u <= 0) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

int receptacle_by_label(const Scenario& s, const std::string& label) {
  for (const auto& r : s.receptacles)
    if (r.label == label) return r.id;
  return -1;
}

enum class Role { normal, partially_occluded, fully_occluded, swap_member, blocker, blocked };

struct Draft {
  std::vector<Role> roles;
  std::vector<std::pair<int, int>> swap_pairs;
  std::vector<std::pair<int, int>> blocked_pairs;  // (blocker, blocked)
};

bool box_in_view(const Scenario& s, const Rect& box, int radius) {
  for (Cell c : box.cells())
    if (percep::cell_in_view(s.grid, s.agent_start, c, radius)) return true;
  return false;
}

bool box_fully_out_of_view(const Scenario& s, const Rect& box, int radius) {
  return !box_in_view(s, box, radius);
}

// Chooses labels and roles so that every fully occluded object has a
// plausible openable receptacle to hide in and paired objects share
// footprint dimensions.
Draft draft_objects(Scenario& s, const GenConfig& cfg, Rng& rng) {
  std::vector<std::string> labels;
  for (const auto& o : vocab::object_kinds()) labels.push_back(o.label);
  rng.shuffle(labels);

  auto has_openable_probable = [&](const std::string& label) {
    for (const auto& [rr, score] : vocab::object_kind(label).probable)
      if (vocab::receptacle_kind(rr).openable) return true;
    return false;
  };

  std::vector<std::string> chosen;
  std::vector<Role> roles;
  std::set<std::string> used;

  auto take = [&](auto pred, Role role) -> bool {
    for (const auto& l : labels) {
      if (used.count(l)) continue;
      if (!pred(l)) continue;
      used.insert(l);
      chosen.push_back(l);
      roles.push_back(role);
      return true;
    }
    return false;
  };

  for (int i = 0; i < cfg.n_fully_occluded; ++i)
    if (!take(has_openable_probable, Role::fully_occluded))
      throw PlanError(Err::capacity_exceeded, "not enough objects with openable placements");

  auto any = [](const std::string&) { return true; };
  Draft d;
  for (int p = 0; p < cfg.n_swap / 2; ++p) {
    // pair needs matching footprints
    std::string first;
    for (const auto& l : labels) {
      if (used.count(l)) continue;
      const auto& k1 = vocab::object_kind(l);
      for (const auto& l2 : labels) {
        if (l2 == l || used.count(l2)) continue;
        const auto& k2 = vocab::object_kind(l2);
        if (k1.fw == k2.fw && k1.fh == k2.fh) {
          first = l;
          used.insert(l);
          used.insert(l2);
          chosen.push_back(l);
          roles.push_back(Role::swap_member);
          chosen.push_back(l2);
          roles.push_back(Role::swap_member);
          d.swap_pairs.push_back({static_cast<int>(chosen.size()) - 2, static_cast<int>(chosen.size()) - 1});
          break;
        }
      }
      if (!first.empty()) break;
    }
    if (first.empty()) throw PlanError(Err::infeasible_swap, "no matching footprints for a swap pair");
  }
  for (int p = 0; p < cfg.n_blocked_pairs; ++p) {
    bool done = false;
    for (const auto& l : labels) {
      if (used.count(l) || done) continue;
      const auto& k1 = vocab::object_kind(l);
      for (const auto& l2 : labels) {
        if (l2 == l || used.count(l2)) continue;
        const auto& k2 = vocab::object_kind(l2);
        if (k1.fw == k2.fw && k1.fh == k2.fh) {
          used.insert(l);
          used.insert(l2);
          chosen.push_back(l);
          roles.push_back(Role::blocker);
          chosen.push_back(l2);
          roles.push_back(Role::blocked);
          d.blocked_pairs.push_back({static_cast<int>(chosen.size()) - 2, static_cast<int>(chosen.size()) - 1});
          done = true;
          break;
        }
      }
    }
    if (!done) throw PlanError(Err::infeasible_swap, "no matching footprints for a blocked pair");
  }
  for (int i = 0; i < cfg.n_partially_occluded; ++i)
    if (!take(any, Role::partially_occluded))
      throw PlanError(Err::capacity_exceeded, "vocabulary exhausted");
  while (static_cast<int>(chosen.size()) < cfg.n_objects)
    if (!take(any, Role::normal)) throw PlanError(Err::capacity_exceeded, "vocabulary exhausted");

  s.objects.clear();
  for (size_t i = 0; i < chosen.size(); ++i) {
    ObjectInstance o;
    o.id = static_cast<int>(i);
    o.label = chosen[i];
    o.fw = vocab::object_kind(chosen[i]).fw;
    o.fh = vocab::object_kind(chosen[i]).fh;
    s.objects.push_back(std::move(o));
  }
  d.roles = std::move(roles);
  return d;
}

void place_goals(Scenario& s, const Draft& d, const GenConfig& cfg, Rng& rng) {
  std::vector<Rect> taken;
  for (size_t i = 0; i < s.objects.size(); ++i) {
    auto& o = s.objects[i];
    Role role = d.roles[i];
    // swap members and blocked objects host a partner on their goal box;
    // that partner must be visible, so the goal must sit in view on an
    // always-open receptacle
    bool hosts_partner = role == Role::swap_member || role == Role::blocked;

    const auto& kind = vocab::object_kind(o.label);
    std::vector<int> rids;
    std::vector<double> weights;
    for (const auto& [rr, score] : kind.probable) {
      int rid = receptacle_by_label(s, rr);
      if (rid >= 0) {
        rids.push_back(rid);
        weights.push_back(score);
      }
    }
    // fall back to arbitrary receptacles once the plausible ones are full
    std::vector<int> fallback;
    for (const auto& r : s.receptacles) fallback.push_back(r.id);
    rng.shuffle(fallback);
    for (int rid : fallback)
      if (std::find(rids.begin(), rids.end(), rid) == rids.end()) {
        rids.push_back(rid);
        weights.push_back(0.01);
      }

    bool placed = false;
    std::vector<int> order;
    {
      std::vector<int> pool(rids.size());
      for (size_t k = 0; k < pool.size(); ++k) pool[k] = static_cast<int>(k);
      std::vector<double> wpool = weights;
      while (!pool.empty()) {
        int pick = weighted_pick(rng, wpool);
        order.push_back(pool[static_cast<size_t>(pick)]);
        pool.erase(pool.begin() + pick);
        wpool.erase(wpool.begin() + pick);
      }
    }
    for (int oi : order) {
      const auto& r = s.receptacles[static_cast<size_t>(rids[static_cast<size_t>(oi)])];
      if (hosts_partner && r.openable) continue;
      auto origins = feasible_origins(r, o.fw, o.fh, taken);
      if (hosts_partner) {
        std::vector<Cell> vis;
        for (Cell c : origins)
          if (box_in_view(s, Rect{c, o.fw, o.fh}, cfg.sense_radius)) vis.push_back(c);
        origins = std::move(vis);
      }
      if (origins.empty()) continue;
      o.goal_pos = origins[rng.index(origins.size())];
      o.goal_receptacle = r.id;
      taken.push_back(o.goal_box());
      placed = true;
      break;
    }
    if (!placed) throw Retry(Err::capacity_exceeded, "goal placement failed for " + o.label);
  }
}

void place_currents(Scenario& s, const Draft& d, const GenConfig& cfg, Rng& rng) {
  const int radius = cfg.sense_radius;
  std::vector<Rect> goal_boxes;
  for (const auto& o : s.objects) goal_boxes.push_back(o.goal_box());

  std::vector<Rect> current_boxes;  // committed current footprints

  // everything starts tidy
  for (auto& o : s.objects) o.current = {o.goal_pos, o.goal_receptacle};

  // pick which normal objects stay put
  std::set<int> displaced;
  for (size_t i = 0; i < s.objects.size(); ++i)
    if (d.roles[i] != Role::normal) displaced.insert(static_cast<int>(i));
  std::vector<int> normals;
  for (size_t i = 0; i < s.objects.size(); ++i)
    if (d.roles[i] == Role::normal) normals.push_back(static_cast<int>(i));
  int extra = cfg.n_shuffled < 0 ? static_cast<int>(normals.size())
                                 : cfg.n_shuffled - static_cast<int>(displaced.size());
  rng.shuffle(normals);
  for (int i = 0; i < extra && i < static_cast<int>(normals.size()); ++i)
    displaced.insert(normals[static_cast<size_t>(i)]);

  // swap pairs trade goal boxes exactly
  for (auto [a, b] : d.swap_pairs) {
    auto& oa = s.objects[static_cast<size_t>(a)];
    auto& ob = s.objects[static_cast<size_t>(b)];
    oa.current = {ob.goal_pos, ob.goal_receptacle};
    ob.current = {oa.goal_pos, oa.goal_receptacle};
  }
  // blockers sit on the blocked object's goal box
  for (auto [blocker, blocked] : d.blocked_pairs) {
    auto& ob = s.objects[static_cast<size_t>(blocker)];
    const auto& ok = s.objects[static_cast<size_t>(blocked)];
    ob.current = {ok.goal_pos, ok.goal_receptacle};
  }

  auto commit_boxes = [&] {
    current_boxes.clear();
    for (const auto& o : s.objects) current_boxes.push_back(o.current_box());
  };
  commit_boxes();

  auto assign = [&](int id, auto receptacle_pred, auto box_pred, bool avoid_goals) {
    auto& o = s.objects[static_cast<size_t>(id)];
    std::vector<int> order;
    for (const auto& r : s.receptacles) order.push_back(r.id);
    rng.shuffle(order);
    // plausible receptacles first so discovery priors stay meaningful
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      double sx = vocab::prior_score(o.label, s.receptacles[static_cast<size_t>(x)].label);
      double sy = vocab::prior_score(o.label, s.receptacles[static_cast<size_t>(y)].label);
      return sx > sy;
    });
    for (int rid : order) {
      const auto& r = s.receptacles[static_cast<size_t>(rid)];
      if (!receptacle_pred(r)) continue;
      std::vector<Rect> taken = current_boxes;
      taken.erase(taken.begin() + id);
      if (avoid_goals) {
        for (size_t gi = 0; gi < goal_boxes.size(); ++gi)
          if (static_cast<int>(gi) != id) taken.push_back(goal_boxes[gi]);
      }
      auto origins = feasible_origins(r, o.fw, o.fh, taken);
      std::vector<Cell> good;
      for (Cell c : origins) {
        if (c == o.goal_pos) continue;  // must be displaced at least one cell
        if (box_pred(Rect{c, o.fw, o.fh}, r)) good.push_back(c);
      }
      if (good.empty()) continue;
      o.current = {good[rng.index(good.size())], rid};
      commit_boxes();
      return;
    }
    throw Retry(Err::capacity_exceeded, "current placement failed for " + o.label);
  };

  for (size_t i = 0; i < s.objects.size(); ++i) {
    int id = static_cast<int>(i);
    switch (d.roles[i]) {
      case Role::partially_occluded: {
        const auto& kind = vocab::object_kind(s.objects[i].label);
        assign(
            id,
            [&](const Receptacle& r) {
              if (r.openable) return false;  // closed boxes would make it fully occluded
              return vocab::prior_score(kind.label, r.label) > 0.0;
            },
            [&](const Rect& box, const Receptacle&) { return box_fully_out_of_view(s, box, radius); },
            true);
        break;
      }
      case Role::fully_occluded: {
        const auto& kind = vocab::object_kind(s.objects[i].label);
        assign(
            id,
            [&](const Receptacle& r) {
              return r.openable && vocab::prior_score(kind.label, r.label) > 0.0;
            },
            [&](const Rect&, const Receptacle&) { return true; }, true);
        break;
      }
      case Role::normal:
        if (displaced.count(id)) {
          assign(
              id, [&](const Receptacle& r) { return !r.openable; },
              [&](const Rect& box, const Receptacle&) { return box_in_view(s, box, radius); }, true);
        }
        break;
      case Role::blocked: {
        assign(
            id, [&](const Receptacle& r) { return !r.openable; },
            [&](const Rect& box, const Receptacle&) { return box_in_view(s, box, radius); }, true);
        break;
      }
      case Role::swap_member:
      case Role::blocker:
        break;  // already placed on partner goals
    }
  }
}

void verify(const Scenario& s, const Draft& d, const GenConfig& cfg) {
  WorldState st(s);
  // footprints pairwise disjoint
  for (size_t i = 0; i < s.objects.size(); ++i)
    for (size_t j = i + 1; j < s.objects.size(); ++j)
      if (st.object_box(static_cast<int>(i)).intersects(st.object_box(static_cast<int>(j))))
        throw Retry(Err::capacity_exceeded, "current footprints overlap");

  int vis = 0, po = 0, fo = 0;
  int undisplaced = 0;
  for (const auto& o : s.objects) {
    bool hidden = st.hidden(o.id);
    bool in_view = percep::object_in_view(st, o.id, s.agent_start, cfg.sense_radius);
    Role role = d.roles[static_cast<size_t>(o.id)];
    if (!o.displaced()) {
      // tidy objects are not occlusion cases; only reachability matters
      ++undisplaced;
      if (nav::distance(s.grid, s.agent_start, o.goal_pos) < 0)
        throw Retry(Err::capacity_exceeded, "object unreachable");
      continue;
    }
    if (hidden) {
      ++fo;
      if (role != Role::fully_occluded) throw Retry(Err::capacity_exceeded, "unplanned hidden object");
    } else if (in_view) {
      ++vis;
      if (role == Role::partially_occluded || role == Role::fully_occluded)
        throw Retry(Err::capacity_exceeded, "occluded object is in view");
    } else {
      ++po;
      if (role != Role::partially_occluded) throw Retry(Err::capacity_exceeded, "object fell out of view");
    }
    if (nav::distance(s.grid, s.agent_start, st.placements[static_cast<size_t>(o.id)].pos) < 0 ||
        nav::distance(s.grid, s.agent_start, o.goal_pos) < 0)
      throw Retry(Err::capacity_exceeded, "object unreachable");
  }
  if (vis + undisplaced != cfg.n_objects - cfg.n_partially_occluded - cfg.n_fully_occluded ||
      po != cfg.n_partially_occluded || fo != cfg.n_fully_occluded)
    throw Retry(Err::capacity_exceeded, "visibility counts off");

  // requested collision structure and nothing more
  std::set<std::pair<int, int>> want_swap(d.swap_pairs.begin(), d.swap_pairs.end());
  std::set<std::pair<int, int>> want_blocked;
  for (auto [blocker, blocked] : d.blocked_pairs) want_blocked.insert({blocker, blocked});
  for (size_t i = 0; i < s.objects.size(); ++i)
    for (size_t j = i + 1; j < s.objects.size(); ++j) {
      const auto& oi = s.objects[i];
      const auto& oj = s.objects[j];
      auto c = collision::classify_pair(oi.id, st.object_box(oi.id), oi.goal_box(), oj.id,
                                        st.object_box(oj.id), oj.goal_box());
      bool want_this_swap = want_swap.count({oi.id, oj.id}) > 0;
      bool want_this_blocked =
          want_blocked.count({oi.id, oj.id}) > 0 || want_blocked.count({oj.id, oi.id}) > 0;
      if (c.kind == collision::CaseKind::swap && !want_this_swap)
        throw Retry(Err::capacity_exceeded, "accidental swap case");
      if (c.kind == collision::CaseKind::blocked_goal && !want_this_blocked)
        throw Retry(Err::capacity_exceeded, "accidental blocked goal case");
      if (c.kind == collision::CaseKind::none && (want_this_swap || want_this_blocked))
        throw Retry(Err::capacity_exceeded, "requested collision case missing");
      if (want_this_blocked && c.kind == collision::CaseKind::blocked_goal) {
        auto it = want_blocked.count({oi.id, oj.id}) ? std::pair<int, int>{oi.id, oj.id}
                                                     : std::pair<int, int>{oj.id, oi.id};
        if (c.blocker_id != it.first || c.blocked_id != it.second)
          throw Retry(Err::capacity_exceeded, "blocked pair roles inverted");
      }
    }
}

Scenario generate_once(const GenConfig& cfg, Rng& rng) {
  Scenario s;
  s.seed = cfg.seed;
  build_floorplan(s, cfg, rng);
  place_receptacles(s, rng);
  auto floor = free_floor_cells(s.grid);
  s.agent_start = floor[rng.index(floor.size())];
  Draft d = draft_objects(s, cfg, rng);
  place_goals(s, d, cfg, rng);
  place_currents(s, d, cfg, rng);
  verify(s, d, cfg);
  s.counts = {cfg.n_objects - cfg.n_partially_occluded - cfg.n_fully_occluded,
              cfg.n_partially_occluded, cfg.n_fully_occluded, cfg.n_swap};
  return s;
}

}  // namespace

Scenario generate_scenario(const GenConfig& cfg) {
  validate_config(cfg);
  Rng rng(cfg.seed);
  std::string last = "scenario generation failed";
  Err last_code = Err::capacity_exceeded;
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      return generate_once(cfg, rng);
    } catch (const Retry& e) {
      last = e.what();
      last_code = e.code();
    }
  }
  throw PlanError(last_code, last + " (after retries)");
}

void shuffle_to_untidy(Scenario& s, const GenConfig& cfg, Rng& rng) {
  // roles with zero occlusion/collision counts: plain displacement of the
  // requested number of objects
  Draft d;
  d.roles.assign(s.objects.size(), Role::normal);
  place_currents(s, d, cfg, rng);
}

PickPlaceResult apply_pick_place(WorldState& st, int object_id, Placement dest) {
  const Scenario& s = *st.scenario;
  if (object_id < 0 || object_id >= static_cast<int>(s.objects.size()))
    throw PlanError(Err::degenerate_input, "apply_pick_place: bad object id");
  const auto& o = s.objects[static_cast<size_t>(object_id)];
  if (st.hidden(object_id))
    throw PlanError(Err::unreachable_object, "object is inside a closed receptacle");

  Cell src = st.placements[static_cast<size_t>(object_id)].pos;
  auto leg1 = nav::shortest_path(s.grid, st.agent, src);
  if (!leg1.reachable) throw PlanError(Err::unreachable_object, "no path to object");

  auto last_free = [&](const std::vector<Cell>& cells, Cell fallback) {
    for (auto it = cells.rbegin(); it != cells.rend(); ++it)
      if (s.grid.is_free(*it)) return *it;
    return fallback;
  };

  if (dest.pos == src) {
    st.agent = last_free(leg1.cells, st.agent);
    return {leg1.length};
  }

  Rect box{dest.pos, o.fw, o.fh};
  for (Cell c : box.cells()) {
    if (!s.grid.is_receptacle_cell(c))
      throw PlanError(Err::dest_occupied, "destination is not placement space");
    for (size_t k = 0; k < st.placements.size(); ++k) {
      if (static_cast<int>(k) == object_id) continue;
      if (st.object_box(static_cast<int>(k)).contains(c))
        throw PlanError(Err::dest_occupied, "destination footprint overlaps an object");
    }
  }
  auto leg2 = nav::shortest_path(s.grid, src, dest.pos);
  if (!leg2.reachable) throw PlanError(Err::unreachable_object, "no path to destination");

  // reaching into a closed receptacle opens it
  for (Cell c : box.cells()) {
    int rid = s.grid.owner_of(c);
    if (rid >= 0 && s.receptacles[static_cast<size_t>(rid)].openable) st.open[static_cast<size_t>(rid)] = 1;
  }
  st.placements[static_cast<size_t>(object_id)] = {dest.pos, s.grid.owner_of(dest.pos)};
  st.agent = last_free(leg2.cells, st.agent);
  return {leg1.length + leg2.length};
}

}  // namespace grid
}  // namespace tidyplan
