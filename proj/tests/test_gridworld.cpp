#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tidyplan/generator.hpp"
#include "tidyplan/nav.hpp"
#include "tidyplan/perception.hpp"
#include "tidyplan/scenario_io.hpp"
#include "tidyplan/vocab.hpp"

using namespace tidyplan;

namespace {

grid::GenConfig table_row_config() {
  grid::GenConfig cfg;
  cfg.n_objects = 10;
  cfg.n_partially_occluded = 4;
  cfg.n_fully_occluded = 0;
  cfg.n_swap = 2;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("generation fills the requested observability counts") {
  auto s = grid::generate_scenario(table_row_config());
  CHECK(s.counts.n_visible == 6);
  CHECK(s.counts.n_partially_occluded == 4);
  CHECK(s.counts.n_fully_occluded == 0);
  CHECK(s.counts.n_swap == 2);
  CHECK(s.objects.size() == 10);

  WorldState st(s);
  int vis = 0, po = 0, fo = 0;
  for (const auto& o : s.objects) {
    if (st.hidden(o.id))
      ++fo;
    else if (percep::object_in_view(st, o.id, s.agent_start, 8))
      ++vis;
    else
      ++po;
  }
  CHECK(vis == 6);
  CHECK(po == 4);
  CHECK(fo == 0);
}

TEST_CASE("generation is a pure function of config and seed") {
  auto a = grid::generate_scenario(table_row_config());
  auto b = grid::generate_scenario(table_row_config());
  CHECK(a == b);
  CHECK(grid::scenario_to_json(a).dump() == grid::scenario_to_json(b).dump());

  auto cfg2 = table_row_config();
  cfg2.seed = 8;
  auto c = grid::generate_scenario(cfg2);
  CHECK_FALSE(a == c);
}

TEST_CASE("zero objects is a degenerate input") {
  grid::GenConfig cfg;
  cfg.n_objects = 0;
  CHECK_THROWS_AS(grid::generate_scenario(cfg), PlanError);
}

TEST_CASE("over-capacity object counts are rejected") {
  grid::GenConfig cfg;
  cfg.n_objects = static_cast<int>(vocab::object_kinds().size()) + 1;
  try {
    grid::generate_scenario(cfg);
    FAIL("expected capacity error");
  } catch (const PlanError& e) {
    CHECK(e.code() == Err::capacity_exceeded);
  }
}

TEST_CASE("fully occluded objects sit inside closed receptacles") {
  grid::GenConfig cfg;
  cfg.n_objects = 8;
  cfg.n_fully_occluded = 3;
  cfg.seed = 21;
  auto s = grid::generate_scenario(cfg);
  WorldState st(s);
  int hidden = 0;
  for (const auto& o : s.objects)
    if (st.hidden(o.id)) {
      ++hidden;
      int rid = s.grid.owner_of(st.placements[static_cast<size_t>(o.id)].pos);
      CHECK(s.receptacles[static_cast<size_t>(rid)].openable);
      CHECK_FALSE(st.receptacle_open(rid));
    }
  CHECK(hidden == 3);
}

TEST_CASE("swap pair footprints mutually overlap partner goals") {
  auto s = grid::generate_scenario(table_row_config());
  WorldState st(s);
  int swap_members = 0;
  for (size_t i = 0; i < s.objects.size(); ++i)
    for (size_t j = i + 1; j < s.objects.size(); ++j) {
      const auto& oi = s.objects[i];
      const auto& oj = s.objects[j];
      bool a = st.object_box(oi.id).intersects(oj.goal_box());
      bool b = oi.goal_box().intersects(st.object_box(oj.id));
      if (a && b) swap_members += 2;
    }
  CHECK(swap_members == 2);
}

TEST_CASE("no two current footprints overlap and ids are conserved") {
  grid::GenConfig cfg;
  cfg.n_objects = 14;
  cfg.n_partially_occluded = 3;
  cfg.n_fully_occluded = 2;
  cfg.n_swap = 2;
  cfg.seed = 3;
  auto s = grid::generate_scenario(cfg);
  WorldState st(s);
  for (size_t i = 0; i < s.objects.size(); ++i) {
    CHECK(s.objects[i].id == static_cast<int>(i));
    for (size_t j = i + 1; j < s.objects.size(); ++j)
      CHECK_FALSE(st.object_box(static_cast<int>(i)).intersects(st.object_box(static_cast<int>(j))));
  }
  // all objects displaced by default, at least one cell
  for (const auto& o : s.objects) CHECK(o.displaced());
  // goals sit on the goal receptacle surface
  for (const auto& o : s.objects) {
    const auto& r = s.receptacles[static_cast<size_t>(o.goal_receptacle)];
    for (Cell c : o.goal_box().cells())
      CHECK(std::find(r.cells.begin(), r.cells.end(), c) != r.cells.end());
  }
}

TEST_CASE("scenario json round trip is lossless") {
  auto s = grid::generate_scenario(table_row_config());
  auto j = grid::scenario_to_json(s);
  auto back = grid::scenario_from_json(j);
  CHECK(back == s);
  CHECK(grid::scenario_to_json(back).dump() == j.dump());

  std::string path = "/tmp/tidyplan_test_scenario.json";
  grid::save_scenario(s, path);
  auto loaded = grid::load_scenario(path);
  CHECK(loaded == s);
}

TEST_CASE("shuffle identity when nothing is selected") {
  grid::GenConfig cfg;
  cfg.n_objects = 6;
  cfg.seed = 5;
  cfg.n_shuffled = 0;
  // build a tidy scenario, then an explicit zero-object shuffle
  auto s = grid::generate_scenario([&] {
    auto c = cfg;
    c.n_shuffled = 0;
    return c;
  }());
  for (const auto& o : s.objects) CHECK(o.current.pos == o.goal_pos);
}

TEST_CASE("one-cell displacement crosses the misplacement threshold") {
  // 0.25 m cells: a single-cell move is 0.25 m, past the 10 cm line
  auto s = grid::generate_scenario(table_row_config());
  CHECK(s.grid.cell_size == 0.25);
  for (const auto& o : s.objects) {
    if (!o.displaced()) continue;
    int dx = std::abs(o.current.pos.x - o.goal_pos.x);
    int dy = std::abs(o.current.pos.y - o.goal_pos.y);
    CHECK(dx + dy >= 1);
    CHECK(static_cast<double>(dx + dy) * s.grid.cell_size >= 0.25);
  }
}

TEST_CASE("pick place moves the object and reports both legs") {
  grid::GenConfig cfg;
  cfg.n_objects = 4;
  cfg.seed = 12;
  auto s = grid::generate_scenario(cfg);
  WorldState st(s);
  const auto& o = s.objects[0];
  Cell src = st.placements[0].pos;
  int want = nav::distance(s.grid, st.agent, src) + nav::distance(s.grid, src, o.goal_pos);
  auto res = grid::apply_pick_place(st, 0, {o.goal_pos, o.goal_receptacle});
  CHECK(res.traversal == want);
  CHECK(st.placements[0].pos == o.goal_pos);
  CHECK(st.at_goal(0));
}

TEST_CASE("pick place to the same cell only walks the approach leg") {
  grid::GenConfig cfg;
  cfg.n_objects = 4;
  cfg.seed = 12;
  auto s = grid::generate_scenario(cfg);
  WorldState st(s);
  Cell src = st.placements[0].pos;
  int want = nav::distance(s.grid, st.agent, src);
  auto res = grid::apply_pick_place(st, 0, {src, st.placements[0].receptacle});
  CHECK(res.traversal == want);
  CHECK(st.placements[0].pos == src);
}

TEST_CASE("pick place rejects occupied destinations") {
  grid::GenConfig cfg;
  cfg.n_objects = 4;
  cfg.seed = 12;
  auto s = grid::generate_scenario(cfg);
  WorldState st(s);
  // drop object 0 onto object 1's current footprint
  Cell occupied = st.placements[1].pos;
  try {
    grid::apply_pick_place(st, 0, {occupied, st.placements[1].receptacle});
    FAIL("expected dest error");
  } catch (const PlanError& e) {
    CHECK(e.code() == Err::dest_occupied);
  }
}

TEST_CASE("blocked pair generation puts the blocker on the blocked goal") {
  grid::GenConfig cfg;
  cfg.n_objects = 6;
  cfg.n_blocked_pairs = 1;
  cfg.seed = 9;
  auto s = grid::generate_scenario(cfg);
  WorldState st(s);
  int blocked_cases = 0;
  for (size_t i = 0; i < s.objects.size(); ++i)
    for (size_t j = i + 1; j < s.objects.size(); ++j) {
      const auto& oi = s.objects[i];
      const auto& oj = s.objects[j];
      bool a = st.object_box(oi.id).intersects(oj.goal_box());
      bool b = oi.goal_box().intersects(st.object_box(oj.id));
      if (a != b) ++blocked_cases;
    }
  CHECK(blocked_cases == 1);
}
