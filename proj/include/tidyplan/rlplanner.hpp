#pragma once

#include <map>
#include <optional>
#include <vector>

#include "tidyplan/checkpoint.hpp"
#include "tidyplan/core.hpp"
#include "tidyplan/gridmap.hpp"
#include "tidyplan/nn.hpp"
#include "tidyplan/stategraph.hpp"

namespace tidyplan {
namespace rl {

struct RlConfig {
  double gamma = 0.95;
  double alpha = 1.0;  // conservative loss tradeoff, >= 0
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_fraction = 0.5;  // of train_steps spent annealing
  double tau = 0.005;             // polyak coefficient
  double lr = 1e-3;
  int batch_size = 64;
  size_t buffer_capacity = 50000;
  double static_penalty = -5.0;
  double completion_bonus = 100.0;
  int gcn_hidden = 32;
  int gcn_depth = 2;
  int qhead_hidden = 64;
  int train_steps = 30000;
  int train_every = 1;
  int step_cap_factor = 10;  // episode step cap = factor * N

  void validate() const {
    if (gamma <= 0 || gamma >= 1) throw PlanError(Err::degenerate_input, "gamma must be in (0,1)");
    if (alpha < 0) throw PlanError(Err::degenerate_input, "alpha must be >= 0");
    if (tau <= 0 || tau > 1) throw PlanError(Err::degenerate_input, "tau must be in (0,1]");
  }
};

// GCN encoder plus a Q head that reads (source, goal, agent) embeddings of
// one candidate object; the target copy tracks both via polyak averaging.
struct QModel {
  graph::GcnWeights gcn;
  nn::Mlp q_head;
  graph::GcnWeights target_gcn;
  nn::Mlp target_head;
  int64_t train_steps_done = 0;

  static QModel init(const RlConfig& cfg, Rng& rng);
  void sync_target();        // target <- online
  void polyak(double tau);   // target <- tau*online + (1-tau)*target

  void save(const std::string& path) const;
  static QModel load(const std::string& path);
};

std::map<int, double> q_values(const graph::GcnWeights& gcn, const nn::Mlp& head,
                               const graph::DirectedStateGraph& g);
inline std::map<int, double> q_values(const QModel& m, const graph::DirectedStateGraph& g) {
  return q_values(m.gcn, m.q_head, g);
}

// Epsilon-greedy over the valid set; greedy ties break toward the lowest id.
int select_action(const std::map<int, double>& q, const std::vector<int>& valid, double epsilon,
                  Rng& rng);

struct Outcome {
  bool static_or_at_goal = false;  // acted on a static or already-tidy object
  int traversal = 0;               // realized cells
  bool completed = false;          // this action finished the rearrangement
};

double reward(const Outcome& outcome, const RlConfig& cfg);

struct Transition {
  graph::DirectedStateGraph state;
  std::vector<int> valid;  // actions available in state
  int action = -1;
  double reward = 0.0;
  graph::DirectedStateGraph next;
  std::vector<int> next_valid;
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}
  void push(Transition t);
  size_t size() const { return data_.size(); }
  const Transition& at(size_t i) const { return data_[i]; }
  std::vector<const Transition*> sample(size_t batch, Rng& rng) const;

 private:
  size_t capacity_;
  size_t write_ = 0;
  std::vector<Transition> data_;
};

// 0.5 * (r + gamma * max_a' Q_target(s',a') - Q(s,a))^2, bootstrap dropped on
// terminal transitions.
double td_term(double r, double gamma, double max_next_q, double q, bool terminal);
double td_loss(const QModel& m, const std::vector<const Transition*>& batch, double gamma);
// alpha * (mean_policy_q - mean_dataset_q) + td
double cql_from_parts(double mean_policy_q, double mean_dataset_q, double alpha, double td);
double cql_loss(const QModel& m, const std::vector<const Transition*>& batch, double alpha,
                double gamma, double* td_out = nullptr);

struct TrainStats {
  double td = 0.0;
  double cql = 0.0;
};

class Trainer {
 public:
  Trainer(QModel& model, const RlConfig& cfg);
  TrainStats step(const ReplayBuffer& buffer, Rng& rng);

 private:
  QModel& model_;
  RlConfig cfg_;
  nn::Adam opt_;
};

double epsilon_at(const RlConfig& cfg, int64_t step);

// Greedy single-step heuristic: cheapest pick-place now, ties to lowest id.
struct CandidateAction {
  int id = -1;
  Cell source;
  Cell goal;
};
int pick_heuristic(const GridMap& map, Cell agent, const std::vector<CandidateAction>& actions);

// Uniform action choice for the random-search policy.
int pick_uniform(const std::vector<int>& valid, Rng& rng);

// Nearest never-seen free cell, the frontier target of the coverage policy;
// empty when every reachable free cell has been sensed.
std::optional<Cell> next_exploration_waypoint(const GridMap& map, const std::vector<uint8_t>& seen,
                                              Cell agent);

}  // namespace rl
}  // namespace tidyplan
