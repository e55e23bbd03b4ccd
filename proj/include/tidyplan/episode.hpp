#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tidyplan/collision.hpp"
#include "tidyplan/core.hpp"
#include "tidyplan/generator.hpp"
#include "tidyplan/gridmap.hpp"
#include "tidyplan/perception.hpp"
#include "tidyplan/rlplanner.hpp"
#include "tidyplan/stategraph.hpp"
#include "tidyplan/uodm.hpp"

namespace tidyplan {
namespace harness {

enum class PlannerKind { cql, heuristic, random_search, greedy_exploration };

std::string to_string(PlannerKind k);
PlannerKind planner_from_string(const std::string& s);

struct EpisodeConfig {
  percep::SenseConfig sense;
  collision::CemParams cem;
  rl::RlConfig rl;
  uint64_t seed = 0;
};

struct TraceRecord {
  std::string kind;  // pick-place | search | open
  int object = -1;   // -1 for exploration waypoints
  int traversal = 0;
  bool discovery_attempt = false;
  bool discovered = false;
};

struct EpisodeTrace {
  uint64_t scenario_seed = 0;
  std::string planner;
  std::vector<TraceRecord> records;
  bool success = false;
  int total_traversal = 0;  // cells
  int discovery_attempts = 0;
  int unseen_initial = 0;
  int n_objects = 0;
  double cell_size = 0.25;
};

struct Metrics {
  double srn = 0.0;
  std::optional<double> eod;  // empty = non-computable
  double ttl = 0.0;           // meters
};

Metrics compute_metrics(const EpisodeTrace& t);

struct PlannerModels {
  const rl::QModel* q = nullptr;
  const uodm::Models* discovery = nullptr;
};

// One planner iteration at a time: predictions, collision resolution, state
// graph, valid action set, then execution of a chosen object. Both the
// evaluation loop and the trainer drive episodes through this.
class EpisodeDriver {
 public:
  EpisodeDriver(const Scenario& s, PlannerKind kind, const PlannerModels& models,
                const EpisodeConfig& cfg);

  // Runs the pre-action stages. False when the episode is over (no valid
  // action or step cap hit).
  bool begin_iteration();

  const std::vector<int>& valid() const { return valid_; }
  const graph::DirectedStateGraph& state_graph() const { return graph_; }
  const percep::Knowledge& knowledge() const { return knowledge_; }
  const WorldState& world() const { return world_; }

  // Executes one object action (pick-place for visible, search for unseen).
  rl::Outcome execute(int object_id);

  bool exhausted() const;  // nothing actionable remains
  bool success() const;
  EpisodeTrace take_trace();
  int steps() const { return static_cast<int>(trace_.records.size()); }
  int step_cap() const { return step_cap_; }

  // CQL/HP action inputs (positions the planner believes in).
  std::vector<rl::CandidateAction> candidate_actions() const;

 private:
  void sense_update();
  void walk(const std::vector<Cell>& cells, int abort_when_seen, bool* aborted, int* walked);
  void run_exploration_phase();
  void refresh_predictions();

  const Scenario& scenario_;
  PlannerKind kind_;
  PlannerModels models_;
  EpisodeConfig cfg_;
  WorldState world_;
  percep::Knowledge knowledge_;
  Rng env_rng_;
  Rng noise_rng_;
  graph::DirectedStateGraph graph_;
  std::vector<int> valid_;
  EpisodeTrace trace_;
  int step_cap_ = 0;
  bool explored_ = false;
};

using ActionPolicy = std::function<int(EpisodeDriver&, Rng&)>;

EpisodeTrace run_episode(const Scenario& s, PlannerKind kind, const PlannerModels& models,
                         const EpisodeConfig& cfg);

// Re-executes a recorded action sequence on a fresh world copy.
EpisodeTrace replay_trace(const Scenario& s, PlannerKind kind, const PlannerModels& models,
                          const EpisodeConfig& cfg, const std::vector<int>& actions);

nlohmann::json trace_to_json(const EpisodeTrace& t);

}  // namespace harness
}  // namespace tidyplan
