#pragma once

#include <string>
#include <vector>

#include "tidyplan/core.hpp"

namespace tidyplan {

enum class CellTag : uint8_t { free_floor = 0, wall = 1, surface = 2, interior = 3 };

// Static occupancy map. Floor cells form the navigation domain; surface
// cells belong to open receptacles (tables etc.), interior cells to
// openable ones (fridges, cabinets). Every non-floor, non-wall cell is
// owned by exactly one receptacle.
struct GridMap {
  int width = 0;
  int height = 0;
  double cell_size = 0.25;  // meters per cell
  std::vector<CellTag> cells;
  std::vector<int16_t> owner;  // receptacle id per cell, -1 elsewhere

  static GridMap blank(int w, int h, double cell_size = 0.25) {
    if (w < 4 || h < 4) throw PlanError(Err::degenerate_input, "map dims must be >= 4");
    GridMap m;
    m.width = w;
    m.height = h;
    m.cell_size = cell_size;
    m.cells.assign(static_cast<size_t>(w) * h, CellTag::free_floor);
    m.owner.assign(static_cast<size_t>(w) * h, -1);
    return m;
  }

  size_t idx(Cell c) const { return static_cast<size_t>(c.y) * width + c.x; }
  bool in_bounds(Cell c) const { return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height; }
  CellTag tag(Cell c) const { return cells[idx(c)]; }
  void set(Cell c, CellTag t, int16_t own = -1) {
    cells[idx(c)] = t;
    owner[idx(c)] = own;
  }
  bool is_free(Cell c) const { return in_bounds(c) && tag(c) == CellTag::free_floor; }
  bool is_receptacle_cell(Cell c) const {
    return in_bounds(c) && (tag(c) == CellTag::surface || tag(c) == CellTag::interior);
  }
  int owner_of(Cell c) const { return in_bounds(c) ? owner[idx(c)] : -1; }

  friend bool operator==(const GridMap&, const GridMap&) = default;
};

enum class RoomKind : uint8_t { living = 0, bedroom = 1, bathroom = 2, kitchen = 3 };

std::string to_string(RoomKind k);
RoomKind room_kind_from_string(const std::string& s);

struct Room {
  int id = 0;
  RoomKind kind = RoomKind::living;
  Rect region;  // interior cells, excluding bounding walls
  friend bool operator==(const Room&, const Room&) = default;
};

struct Receptacle {
  int id = 0;
  std::string label;  // "room|kind", e.g. "kitchen|fridge"
  int room_id = 0;
  std::vector<Cell> cells;  // placement cells (surface or interior)
  bool openable = false;
  bool open = true;  // non-openable receptacles are always open
  Cell centroid;
  friend bool operator==(const Receptacle&, const Receptacle&) = default;
};

// Where an object currently sits: footprint origin plus owning receptacle.
struct Placement {
  Cell pos;
  int receptacle = -1;
  friend bool operator==(const Placement&, const Placement&) = default;
};

struct ObjectInstance {
  int id = 0;
  std::string label;
  int fw = 1;  // footprint width in cells
  int fh = 1;  // footprint height in cells
  Placement current;
  Cell goal_pos;
  int goal_receptacle = -1;

  Rect current_box() const { return Rect{current.pos, fw, fh}; }
  Rect goal_box() const { return Rect{goal_pos, fw, fh}; }
  bool displaced() const { return current.pos != goal_pos; }
  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

struct ScenarioCounts {
  int n_visible = 0;
  int n_partially_occluded = 0;
  int n_fully_occluded = 0;
  int n_swap = 0;
  friend bool operator==(const ScenarioCounts&, const ScenarioCounts&) = default;
};

struct Scenario {
  uint64_t seed = 0;
  GridMap grid;
  std::vector<Room> rooms;
  std::vector<Receptacle> receptacles;
  std::vector<ObjectInstance> objects;
  Cell agent_start;
  ScenarioCounts counts;

  const Receptacle& receptacle(int id) const { return receptacles.at(static_cast<size_t>(id)); }
  const ObjectInstance& object(int id) const { return objects.at(static_cast<size_t>(id)); }
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Mutable episode state; the scenario itself stays immutable.
struct WorldState {
  const Scenario* scenario = nullptr;
  std::vector<Placement> placements;  // per object id
  std::vector<uint8_t> open;          // per receptacle id
  Cell agent;

  explicit WorldState(const Scenario& s) : scenario(&s), agent(s.agent_start) {
    placements.reserve(s.objects.size());
    for (const auto& o : s.objects) placements.push_back(o.current);
    open.reserve(s.receptacles.size());
    for (const auto& r : s.receptacles) open.push_back(r.open ? 1 : 0);
  }

  Rect object_box(int id) const {
    const auto& o = scenario->objects[static_cast<size_t>(id)];
    return Rect{placements[static_cast<size_t>(id)].pos, o.fw, o.fh};
  }
  bool receptacle_open(int rid) const { return open[static_cast<size_t>(rid)] != 0; }

  // An object is hidden while any footprint cell lies inside a closed receptacle.
  bool hidden(int id) const;
  bool at_goal(int id) const {
    return placements[static_cast<size_t>(id)].pos == scenario->objects[static_cast<size_t>(id)].goal_pos;
  }
  bool all_at_goal() const {
    for (size_t i = 0; i < placements.size(); ++i)
      if (!at_goal(static_cast<int>(i))) return false;
    return true;
  }
};

}  // namespace tidyplan
