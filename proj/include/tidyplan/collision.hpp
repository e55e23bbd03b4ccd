#pragma once

#include <optional>
#include <vector>

#include "tidyplan/core.hpp"
#include "tidyplan/gridmap.hpp"

namespace tidyplan {
namespace collision {

enum class CaseKind { none, blocked_goal, swap };

struct CollisionCase {
  CaseKind kind = CaseKind::none;
  int blocked_id = -1;  // blocked_goal: object whose goal footprint is occupied
  int blocker_id = -1;  // blocked_goal: object sitting on it
  int swap_i = -1;      // swap: symmetric pair
  int swap_j = -1;
};

// Pairwise classification from current footprint boxes and goal boxes.
// Condition A: box_i intersects j's goal footprint; condition B: i's goal
// footprint intersects box_j. One condition -> blocked goal, both -> swap.
CollisionCase classify_pair(int id_i, const Rect& box_i, const Rect& goal_i,
                            int id_j, const Rect& box_j, const Rect& goal_j);

struct CemParams {
  int samples = 64;      // N_f
  int elites = 8;        // M_f
  int iterations = 10;
  double std_floor = 1.0;  // cells
};

// Boolean per map cell: placement cells currently free.
using FreeMask = std::vector<uint8_t>;

// Objective for a candidate buffer origin p: exp(-euclidean(p, target.origin))
// when the moving box placed at p stays inside free placement cells and clear
// of the target box; 0 otherwise.
double cem_objective(Cell p, int moving_w, int moving_h, const Rect& target,
                     const GridMap& map, const FreeMask& free_mask);

// Cross-entropy search over free placement cells for the best-scoring buffer
// origin. Falls back to an exhaustive scan when sampling never finds a
// feasible cell; throws no_feasible_cell when none exists at all.
Cell cem_search(int moving_w, int moving_h, const Rect& target, const GridMap& map,
                const FreeMask& free_mask, const CemParams& params, Rng& rng);

}  // namespace collision

namespace percep {
struct Knowledge;
}

namespace collision {

// Re-derives the resolved-goal overrides from current visible positions:
// swap pairs get buffer cells (each member's buffer sought near its
// partner's current box, clear of the partner's goal footprint and of the
// buffer committed first), blocked objects pin to their current cell until
// the blocker vacates. A pin cycle with no unseen objects left unpins the
// lowest id through a buffer so the episode can progress.
void resolve_collisions(percep::Knowledge& k, const Scenario& s, const CemParams& params, Rng& rng);

}  // namespace collision
}  // namespace tidyplan
