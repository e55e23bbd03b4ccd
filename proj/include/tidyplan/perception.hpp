#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tidyplan/core.hpp"
#include "tidyplan/gridmap.hpp"

namespace tidyplan {
namespace percep {

// A cell is in view when it lies within the sensing radius (euclidean, cell
// centers) and the straight ray from the agent is not blocked by a wall.
bool cell_in_view(const GridMap& map, Cell agent, Cell target, int radius);

// Visible objects are not inside a closed receptacle and expose at least one
// footprint cell to the agent's line of sight.
bool object_in_view(const WorldState& state, int object_id, Cell agent, int radius);

struct Prediction {
  int receptacle = -1;
  Cell pos;  // receptacle centroid
};

// The agent's belief state. Never references the true position of an object
// that is still unseen.
struct Knowledge {
  std::map<int, Cell> visible;            // object id -> observed footprint origin
  std::map<int, std::string> observed_labels;
  std::set<int> unseen;                   // object ids known only by label
  std::map<int, Prediction> predicted;    // per unseen object
  std::map<int, std::vector<int>> candidates;  // per unseen object, ordered receptacle ids
  std::map<int, Cell> resolved_goals;     // P^B overrides; absent -> true goal
  std::vector<uint8_t> seen_cells;        // per map cell, ever in view
  std::vector<uint8_t> open_known;        // per receptacle, agent-known open flag
  std::set<int> inspected;                // receptacles known to hold no unseen object
  std::vector<uint8_t> free_map;          // believed free placement cells (M^R)
  int discovery_attempts = 0;             // N_D
  std::set<int> unfindable;
};

struct SenseConfig {
  int radius = 8;
  double label_noise = 0.0;  // probability an observed label is flipped
};

struct Observation {
  std::map<int, Cell> objects_seen;            // id -> footprint origin, all in view
  std::map<int, std::string> labels;           // observed labels for the above
  std::vector<Cell> cells_seen;                // cells in view this sense
  std::vector<uint8_t> receptacle_open_state;  // open flags at sense time
};

// Deterministic egocentric sensing from one pose. Repeated calls from the
// same pose yield the same observation.
Observation sense(const WorldState& state, Cell agent, const SenseConfig& cfg, Rng* noise_rng = nullptr);

Knowledge initial_knowledge(const WorldState& state);

// Folds an observation into the belief: unseen objects that were observed
// become visible, their predictions drop, receptacles proven empty of unseen
// objects leave every candidate list, and the believed free map refreshes.
void update_knowledge(Knowledge& k, const Observation& obs, const WorldState& state);

// Opens a receptacle the agent stands next to; contents become sensable.
// Returns ids revealed by an immediate re-sense.
std::vector<int> open_receptacle(WorldState& state, Knowledge& k, int receptacle_id,
                                 const SenseConfig& cfg, Rng* noise_rng = nullptr);

// Believed free placement cells: receptacle cells that are not interior to a
// believed-closed receptacle and not covered by a known object footprint.
std::vector<uint8_t> believed_free_map(const Knowledge& k, const WorldState& state);

}  // namespace percep
}  // namespace tidyplan
