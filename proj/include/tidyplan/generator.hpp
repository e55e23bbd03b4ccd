#pragma once

#include "tidyplan/core.hpp"
#include "tidyplan/gridmap.hpp"

namespace tidyplan {
namespace grid {

struct GenConfig {
  int width = 26;
  int height = 26;
  double cell_size = 0.25;
  uint64_t seed = 0;
  int n_objects = 10;
  int n_partially_occluded = 0;  // out of the initial field of view
  int n_fully_occluded = 0;      // inside a closed openable receptacle
  int n_swap = 0;                // objects forming swap pairs (even)
  int n_blocked_pairs = 0;       // blocker/blocked pairs among visible objects
  int n_shuffled = -1;           // displaced objects in total; -1 = all
  int sense_radius = 8;
};

// Deterministic scenario construction: floorplan, receptacles, goal
// placements, then an untidy shuffle that realizes the requested partial
// observability and collision cases exactly.
Scenario generate_scenario(const GenConfig& cfg);

// Reassigns current placements of a tidy scenario (currents == goals).
// Exposed for the identity/threshold contracts; generate_scenario uses it.
void shuffle_to_untidy(Scenario& s, const GenConfig& cfg, Rng& rng);

struct PickPlaceResult {
  int traversal = 0;  // cells, both legs
};

// Moves an accessible object to a destination whose footprint is free
// placement space. Opens closed receptacles at the destination, updates the
// agent pose to the last walkable cell of the place leg.
PickPlaceResult apply_pick_place(WorldState& state, int object_id, Placement dest);

}  // namespace grid
}  // namespace tidyplan
