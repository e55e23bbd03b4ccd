#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "test_util.hpp"
#include "tidyplan/collision.hpp"
#include "tidyplan/generator.hpp"
#include "tidyplan/perception.hpp"

using namespace tidyplan;
using collision::CaseKind;

namespace {

// Oracle: rasterize both rectangles into cell sets and intersect.
bool rects_overlap_oracle(const Rect& a, const Rect& b) {
  std::set<Cell> cells;
  for (Cell c : a.cells()) cells.insert(c);
  for (Cell c : b.cells())
    if (cells.count(c)) return true;
  return false;
}

CaseKind classify_oracle(const Rect& bi, const Rect& gi, const Rect& bj, const Rect& gj) {
  bool a = rects_overlap_oracle(bi, gj);
  bool b = rects_overlap_oracle(gi, bj);
  if (a && b) return CaseKind::swap;
  if (a || b) return CaseKind::blocked_goal;
  return CaseKind::none;
}

Rect random_rect(Rng& rng, int span) {
  return Rect{{rng.uniform_int(0, span), rng.uniform_int(0, span)}, rng.uniform_int(1, 3),
              rng.uniform_int(1, 3)};
}

}  // namespace

TEST_CASE("disjoint boxes classify as none") {
  auto c = collision::classify_pair(0, {{0, 0}, 2, 2}, {{5, 0}, 2, 2}, 1, {{10, 10}, 2, 2},
                                    {{5, 10}, 2, 2});
  CHECK(c.kind == CaseKind::none);
}

TEST_CASE("one-sided overlap is a blocked goal with the right roles") {
  // object 0 sits exactly on object 1's goal; 0's own goal is clear
  auto c = collision::classify_pair(0, {{4, 4}, 2, 2}, {{0, 0}, 2, 2}, 1, {{9, 9}, 2, 2},
                                    {{4, 4}, 2, 2});
  REQUIRE(c.kind == CaseKind::blocked_goal);
  CHECK(c.blocked_id == 1);
  CHECK(c.blocker_id == 0);
}

TEST_CASE("mutual overlap is a swap") {
  auto c = collision::classify_pair(0, {{4, 4}, 2, 2}, {{9, 9}, 2, 2}, 1, {{9, 9}, 2, 2},
                                    {{4, 4}, 2, 2});
  REQUIRE(c.kind == CaseKind::swap);
  CHECK(c.swap_i == 0);
  CHECK(c.swap_j == 1);
}

TEST_CASE("classification is symmetric in the pair order") {
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    Rect bi = random_rect(rng, 8), gi = random_rect(rng, 8);
    Rect bj = random_rect(rng, 8), gj = random_rect(rng, 8);
    auto fwd = collision::classify_pair(0, bi, gi, 1, bj, gj);
    auto rev = collision::classify_pair(1, bj, gj, 0, bi, gi);
    CHECK(fwd.kind == rev.kind);
    if (fwd.kind == CaseKind::swap) {
      CHECK(fwd.swap_i == rev.swap_i);
      CHECK(fwd.swap_j == rev.swap_j);
    }
    if (fwd.kind == CaseKind::blocked_goal) {
      CHECK(fwd.blocked_id == rev.blocked_id);
      CHECK(fwd.blocker_id == rev.blocker_id);
    }
  }
}

TEST_CASE("1000 random quadruples match the rasterized oracle") {
  Rng rng(99);
  for (int t = 0; t < 1000; ++t) {
    Rect bi = random_rect(rng, 10), gi = random_rect(rng, 10);
    Rect bj = random_rect(rng, 10), gj = random_rect(rng, 10);
    auto got = collision::classify_pair(0, bi, gi, 1, bj, gj);
    CHECK(got.kind == classify_oracle(bi, gi, bj, gj));
  }
}

TEST_CASE("objective is exp of negative distance on feasible cells, zero otherwise") {
  auto m = test::map_from_ascii({
      "ssssssss",
      "ssssssss",
      "ssssssss",
      "ssssssss",
  });
  collision::FreeMask free(m.cells.size(), 1);
  Rect target{{5, 0}, 2, 2};

  // overlapping placement scores zero
  CHECK(collision::cem_objective({5, 1}, 2, 2, target, m, free) == 0.0);
  // distance one
  double f1 = collision::cem_objective({4, 0}, 1, 1, target, m, free);
  CHECK(f1 == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(f1 == doctest::Approx(0.367879).epsilon(1e-4));
  // distance two decays further
  double f2 = collision::cem_objective({3, 0}, 1, 1, target, m, free);
  CHECK(f2 == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(f2 < f1);
  // off free-space placement scores zero
  free[m.idx({0, 0})] = 0;
  CHECK(collision::cem_objective({0, 0}, 1, 1, target, m, free) == 0.0);
}

TEST_CASE("single feasible cell is forced") {
  auto m = test::map_from_ascii({
      "ssss",
      "ssss",
      "ssss",
      "ssss",
  });
  collision::FreeMask free(m.cells.size(), 0);
  free[m.idx({3, 3})] = 1;
  Rect target{{0, 0}, 2, 2};
  Rng rng(5);
  collision::CemParams params;
  Cell got = collision::cem_search(1, 1, target, m, free, params, rng);
  CHECK(got == Cell{3, 3});
}

TEST_CASE("no feasible cell raises the documented error") {
  auto m = test::map_from_ascii({
      "ssss",
      "ssss",
      "ssss",
      "ssss",
  });
  collision::FreeMask free(m.cells.size(), 0);
  free[m.idx({0, 0})] = 1;  // only cell overlaps the target
  Rect target{{0, 0}, 2, 2};
  Rng rng(5);
  try {
    collision::cem_search(1, 1, target, m, free, collision::CemParams{}, rng);
    FAIL("expected no_feasible_cell");
  } catch (const PlanError& e) {
    CHECK(e.code() == Err::no_feasible_cell);
  }
}

TEST_CASE("cem reaches at least 95 percent of the exhaustive optimum") {
  Rng rng(2024);
  int good = 0, total = 200;
  for (int t = 0; t < total; ++t) {
    auto m = test::random_map(rng, 16, 16, 0.0, 0.55);
    collision::FreeMask free(m.cells.size(), 0);
    for (size_t i = 0; i < m.cells.size(); ++i)
      if (m.cells[i] == CellTag::surface && rng.uniform() < 0.8) free[i] = 1;
    int mw = rng.uniform_int(1, 2), mh = rng.uniform_int(1, 2);
    Rect target{{rng.uniform_int(0, 13), rng.uniform_int(0, 13)}, 2, 2};

    double best = 0;
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x)
        best = std::max(best, collision::cem_objective({x, y}, mw, mh, target, m, free));
    if (best == 0) {
      ++good;  // nothing feasible for either method
      continue;
    }
    collision::CemParams params;
    Cell got = collision::cem_search(mw, mh, target, m, free, params, rng);
    double f = collision::cem_objective(got, mw, mh, target, m, free);
    CHECK(f > 0.0);  // always feasible when it returns
    if (f >= 0.95 * best) ++good;
  }
  CHECK(good >= 190);
}

TEST_CASE("determinism for a fixed seed") {
  auto m = test::map_from_ascii({
      "ssssssss",
      "ssssssss",
      "ssssssss",
      "ssssssss",
  });
  collision::FreeMask free(m.cells.size(), 1);
  Rect target{{3, 1}, 2, 2};
  Rng a(77), b(77);
  Cell one = collision::cem_search(2, 1, target, m, free, collision::CemParams{}, a);
  Cell two = collision::cem_search(2, 1, target, m, free, collision::CemParams{}, b);
  CHECK(one == two);
}

TEST_CASE("swap pair resolution produces disjoint feasible buffers") {
  grid::GenConfig cfg;
  cfg.n_objects = 6;
  cfg.n_swap = 2;
  cfg.seed = 19;
  auto s = grid::generate_scenario(cfg);
  WorldState st(s);
  auto k = percep::initial_knowledge(st);
  percep::update_knowledge(k, percep::sense(st, st.agent, percep::SenseConfig{}), st);
  Rng rng(4);
  collision::resolve_collisions(k, s, collision::CemParams{}, rng);

  // find the swap pair by classification
  int found = 0;
  for (size_t i = 0; i < s.objects.size(); ++i)
    for (size_t j = i + 1; j < s.objects.size(); ++j) {
      const auto& oi = s.objects[i];
      const auto& oj = s.objects[j];
      auto c = collision::classify_pair(oi.id, st.object_box(oi.id), oi.goal_box(), oj.id,
                                        st.object_box(oj.id), oj.goal_box());
      if (c.kind != CaseKind::swap) continue;
      ++found;
      REQUIRE(k.resolved_goals.count(oi.id) == 1);
      REQUIRE(k.resolved_goals.count(oj.id) == 1);
      Rect bi{k.resolved_goals.at(oi.id), oi.fw, oi.fh};
      Rect bj{k.resolved_goals.at(oj.id), oj.fw, oj.fh};
      CHECK_FALSE(rects_overlap_oracle(bi, bj));           // buffers disjoint
      CHECK_FALSE(rects_overlap_oracle(bi, oj.goal_box()));  // clear of partner goals
      CHECK_FALSE(rects_overlap_oracle(bj, oi.goal_box()));
      for (Cell c2 : bi.cells()) CHECK(k.free_map[s.grid.idx(c2)] == 1);
      for (Cell c2 : bj.cells()) CHECK(k.free_map[s.grid.idx(c2)] == 1);
    }
  CHECK(found == 1);
}

TEST_CASE("blocked object pins to its current cell until the blocker moves") {
  grid::GenConfig cfg;
  cfg.n_objects = 5;
  cfg.n_blocked_pairs = 1;
  cfg.seed = 23;
  auto s = grid::generate_scenario(cfg);
  WorldState st(s);
  auto k = percep::initial_knowledge(st);
  percep::update_knowledge(k, percep::sense(st, st.agent, percep::SenseConfig{}), st);
  Rng rng(4);
  collision::resolve_collisions(k, s, collision::CemParams{}, rng);

  int blocked = -1, blocker = -1;
  for (size_t i = 0; i < s.objects.size(); ++i)
    for (size_t j = i + 1; j < s.objects.size(); ++j) {
      const auto& oi = s.objects[i];
      const auto& oj = s.objects[j];
      auto c = collision::classify_pair(oi.id, st.object_box(oi.id), oi.goal_box(), oj.id,
                                        st.object_box(oj.id), oj.goal_box());
      if (c.kind == CaseKind::blocked_goal) {
        blocked = c.blocked_id;
        blocker = c.blocker_id;
      }
    }
  REQUIRE(blocked >= 0);
  CHECK(k.resolved_goals.at(blocked) == k.visible.at(blocked));
  CHECK(k.resolved_goals.count(blocker) == 0);

  // blocker vacates to its own goal; re-resolution releases the pin
  grid::apply_pick_place(st, blocker, {s.objects[static_cast<size_t>(blocker)].goal_pos,
                                       s.objects[static_cast<size_t>(blocker)].goal_receptacle});
  percep::update_knowledge(k, percep::sense(st, st.agent, percep::SenseConfig{}), st);
  k.visible[blocker] = st.placements[static_cast<size_t>(blocker)].pos;
  collision::resolve_collisions(k, s, collision::CemParams{}, rng);
  CHECK(k.resolved_goals.count(blocked) == 0);
}

TEST_CASE("no collisions leaves resolved goals empty") {
  grid::GenConfig cfg;
  cfg.n_objects = 5;
  cfg.seed = 31;
  auto s = grid::generate_scenario(cfg);
  WorldState st(s);
  auto k = percep::initial_knowledge(st);
  percep::update_knowledge(k, percep::sense(st, st.agent, percep::SenseConfig{}), st);
  Rng rng(4);
  collision::resolve_collisions(k, s, collision::CemParams{}, rng);
  CHECK(k.resolved_goals.empty());
}
