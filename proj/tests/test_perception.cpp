#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "tidyplan/generator.hpp"
#include "tidyplan/perception.hpp"
#include "tidyplan/nav.hpp"

using namespace tidyplan;

namespace {

// Hand-built scene: one room, one table (surface), one fridge (interior,
// closed), two objects.
Scenario tiny_scene() {
  Scenario s;
  s.seed = 1;
  s.grid = test::map_from_ascii({
      "##########",
      "#........#",
      "#.ss.....#",
      "#........#",
      "#.ii.....#",
      "#........#",
      "##########",
  });
  s.rooms.push_back({0, RoomKind::kitchen, Rect{{1, 1}, 8, 5}});
  Receptacle table;
  table.id = 0;
  table.label = "kitchen|counter";
  table.room_id = 0;
  table.cells = {{2, 2}, {3, 2}};
  table.openable = false;
  table.open = true;
  table.centroid = {2, 2};
  Receptacle fridge;
  fridge.id = 1;
  fridge.label = "kitchen|fridge";
  fridge.room_id = 0;
  fridge.cells = {{2, 4}, {3, 4}};
  fridge.openable = true;
  fridge.open = false;
  fridge.centroid = {2, 4};
  s.receptacles = {table, fridge};
  for (Cell c : table.cells) s.grid.owner[s.grid.idx(c)] = 0;
  for (Cell c : fridge.cells) s.grid.owner[s.grid.idx(c)] = 1;

  ObjectInstance apple;
  apple.id = 0;
  apple.label = "apple";
  apple.fw = apple.fh = 1;
  apple.current = {{2, 4}, 1};  // inside the closed fridge
  apple.goal_pos = {2, 2};
  apple.goal_receptacle = 0;
  ObjectInstance mug;
  mug.id = 1;
  mug.label = "mug";
  mug.fw = mug.fh = 1;
  mug.current = {{3, 2}, 0};  // on the table
  mug.goal_pos = {2, 2};
  mug.goal_receptacle = 0;
  s.objects = {apple, mug};
  s.agent_start = {5, 3};
  s.counts = {1, 0, 1, 0};
  return s;
}

}  // namespace

TEST_CASE("objects in the open are seen, closed receptacles hide") {
  auto s = tiny_scene();
  WorldState st(s);
  percep::SenseConfig cfg;
  auto obs = percep::sense(st, st.agent, cfg);
  CHECK(obs.objects_seen.count(1) == 1);   // mug on the table
  CHECK(obs.objects_seen.count(0) == 0);   // apple behind the closed door
  CHECK(percep::object_in_view(st, 1, st.agent, 8));
  CHECK_FALSE(percep::object_in_view(st, 0, st.agent, 8));
}

TEST_CASE("sense is deterministic and idempotent") {
  auto s = tiny_scene();
  WorldState st(s);
  percep::SenseConfig cfg;
  auto a = percep::sense(st, st.agent, cfg);
  auto b = percep::sense(st, st.agent, cfg);
  CHECK(a.objects_seen == b.objects_seen);
  CHECK(a.cells_seen == b.cells_seen);

  auto k = percep::initial_knowledge(st);
  percep::update_knowledge(k, a, st);
  auto visible_once = k.visible;
  auto unseen_once = k.unseen;
  percep::update_knowledge(k, b, st);
  CHECK(k.visible == visible_once);
  CHECK(k.unseen == unseen_once);
}

TEST_CASE("walls block sight across rooms") {
  grid::GenConfig cfg;
  cfg.n_objects = 10;
  cfg.n_partially_occluded = 4;
  cfg.n_swap = 2;
  cfg.seed = 7;
  auto s = grid::generate_scenario(cfg);
  WorldState st(s);
  auto k = percep::initial_knowledge(st);
  auto obs = percep::sense(st, s.agent_start, percep::SenseConfig{});
  percep::update_knowledge(k, obs, st);
  CHECK(k.visible.size() == 6);
  CHECK(k.unseen.size() == 4);
  // belief never references a hidden object's true position
  for (int id : k.unseen) CHECK(k.visible.count(id) == 0);
}

TEST_CASE("radius limits sensing") {
  auto s = tiny_scene();
  WorldState st(s);
  percep::SenseConfig near;
  near.radius = 1;
  auto obs = percep::sense(st, st.agent, near);
  CHECK(obs.objects_seen.empty());
}

TEST_CASE("opening a receptacle reveals its contents") {
  auto s = tiny_scene();
  WorldState st(s);
  auto k = percep::initial_knowledge(st);
  percep::update_knowledge(k, percep::sense(st, st.agent, percep::SenseConfig{}), st);
  CHECK(k.unseen.count(0) == 1);

  st.agent = {4, 4};  // adjacent to the fridge
  auto revealed = percep::open_receptacle(st, k, 1, percep::SenseConfig{});
  CHECK(revealed == std::vector<int>{0});
  CHECK(k.visible.count(0) == 1);
  CHECK(k.unseen.empty());
}

TEST_CASE("open errors: not openable, not adjacent") {
  auto s = tiny_scene();
  WorldState st(s);
  auto k = percep::initial_knowledge(st);
  st.agent = {4, 2};
  try {
    percep::open_receptacle(st, k, 0, percep::SenseConfig{});
    FAIL("table is not openable");
  } catch (const PlanError& e) {
    CHECK(e.code() == Err::not_openable);
  }
  st.agent = {7, 1};
  try {
    percep::open_receptacle(st, k, 1, percep::SenseConfig{});
    FAIL("agent is far away");
  } catch (const PlanError& e) {
    CHECK(e.code() == Err::not_adjacent);
  }
}

TEST_CASE("opening an empty receptacle reveals nothing but marks it inspected") {
  auto s = tiny_scene();
  s.objects[0].current = {{3, 2}, 0};  // move the apple out of the fridge
  WorldState st(s);
  // keep footprints apart
  st.placements[1].pos = {2, 2};
  auto k = percep::initial_knowledge(st);
  percep::update_knowledge(k, percep::sense(st, st.agent, percep::SenseConfig{}), st);
  CHECK(k.unseen.empty());  // everything sits in plain sight now
  k.candidates[99] = {0, 1};  // synthetic candidate list to watch the pruning
  st.agent = {4, 4};
  auto revealed = percep::open_receptacle(st, k, 1, percep::SenseConfig{});
  CHECK(revealed.empty());
  CHECK(k.inspected.count(1) == 1);
  CHECK(k.candidates[99] == std::vector<int>{0});
}

TEST_CASE("unseen set never grows") {
  grid::GenConfig cfg;
  cfg.n_objects = 8;
  cfg.n_partially_occluded = 3;
  cfg.n_fully_occluded = 1;
  cfg.seed = 33;
  auto s = grid::generate_scenario(cfg);
  WorldState st(s);
  auto k = percep::initial_knowledge(st);
  percep::update_knowledge(k, percep::sense(st, st.agent, percep::SenseConfig{}), st);
  size_t prev = k.unseen.size();
  Rng rng(4);
  for (int step = 0; step < 60; ++step) {
    // random walk over free cells
    std::vector<Cell> moves;
    for (Cell d : nav::neighbor_offsets()) {
      Cell n{st.agent.x + d.x, st.agent.y + d.y};
      if (s.grid.is_free(n)) moves.push_back(n);
    }
    st.agent = moves[rng.index(moves.size())];
    percep::update_knowledge(k, percep::sense(st, st.agent, percep::SenseConfig{}), st);
    CHECK(k.unseen.size() <= prev);
    prev = k.unseen.size();
    CHECK(k.visible.size() + k.unseen.size() == s.objects.size());
  }
}

TEST_CASE("believed free map excludes known footprints and closed interiors") {
  auto s = tiny_scene();
  WorldState st(s);
  auto k = percep::initial_knowledge(st);
  percep::update_knowledge(k, percep::sense(st, st.agent, percep::SenseConfig{}), st);
  // closed fridge interior is not believed-free
  CHECK(k.free_map[s.grid.idx({2, 4})] == 0);
  CHECK(k.free_map[s.grid.idx({3, 4})] == 0);
  // table cell under the mug is taken, the other one is free
  CHECK(k.free_map[s.grid.idx({3, 2})] == 0);
  CHECK(k.free_map[s.grid.idx({2, 2})] == 1);
}
