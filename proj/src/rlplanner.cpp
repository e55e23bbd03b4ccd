#include "tidyplan/rlplanner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "tidyplan/nav.hpp"

namespace tidyplan {
namespace rl {

QModel QModel::init(const RlConfig& cfg, Rng& rng) {
  cfg.validate();
  QModel m;
  m.gcn = graph::GcnWeights(graph::kNodeFeatDim, cfg.gcn_hidden, cfg.gcn_depth, rng);
  m.q_head = nn::Mlp({3 * cfg.gcn_hidden, cfg.qhead_hidden, cfg.qhead_hidden, 1}, rng);
  m.sync_target();
  return m;
}

void QModel::sync_target() {
  target_gcn = gcn;
  target_head = q_head;
}

void QModel::polyak(double tau) {
  auto online_g = graph::param_view(static_cast<const graph::GcnWeights&>(gcn));
  auto target_g = graph::param_view(target_gcn);
  for (size_t i = 0; i < online_g.size(); ++i)
    *target_g[i] = tau * *online_g[i] + (1 - tau) * *target_g[i];
  auto online_h = nn::param_view(static_cast<const nn::Mlp&>(q_head));
  auto target_h = nn::param_view(target_head);
  for (size_t i = 0; i < online_h.size(); ++i)
    *target_h[i] = tau * *online_h[i] + (1 - tau) * *target_h[i];
}

void QModel::save(const std::string& path) const {
  ckpt::Checkpoint c;
  graph::gcn_to_checkpoint(gcn, c, "planner.gcn");
  graph::gcn_to_checkpoint(target_gcn, c, "planner.target_gcn");
  auto dump = [&](const nn::Mlp& m, const std::string& name) {
    c.put(name + ".layers", {1}, {static_cast<double>(m.w.size())});
    for (size_t l = 0; l < m.w.size(); ++l) {
      c.put(name + ".w" + std::to_string(l),
            {static_cast<uint32_t>(m.w[l].rows), static_cast<uint32_t>(m.w[l].cols)}, m.w[l].a);
      c.put(name + ".b" + std::to_string(l), {static_cast<uint32_t>(m.b[l].size())}, m.b[l]);
    }
  };
  dump(q_head, "planner.q_head");
  dump(target_head, "planner.target_head");
  c.put("planner.train_steps_done", {1}, {static_cast<double>(train_steps_done)});
  c.save(path);
}

QModel QModel::load(const std::string& path) {
  auto c = ckpt::Checkpoint::load(path);
  QModel m;
  m.gcn = graph::gcn_from_checkpoint(c, "planner.gcn");
  m.target_gcn = graph::gcn_from_checkpoint(c, "planner.target_gcn");
  auto read = [&](nn::Mlp& mlp, const std::string& name) {
    size_t layers = static_cast<size_t>(c.get(name + ".layers").data[0]);
    for (size_t l = 0; l < layers; ++l) {
      const auto& ws = c.get(name + ".w" + std::to_string(l));
      nn::Mat w(static_cast<int>(ws.dims[0]), static_cast<int>(ws.dims[1]));
      w.a = ws.data;
      mlp.w.push_back(std::move(w));
      mlp.b.push_back(c.get(name + ".b" + std::to_string(l)).data);
    }
  };
  read(m.q_head, "planner.q_head");
  read(m.target_head, "planner.target_head");
  m.train_steps_done = static_cast<int64_t>(c.get("planner.train_steps_done").data[0]);
  return m;
}

namespace {

nn::Vec head_input(const std::vector<nn::Vec>& z, const graph::DirectedStateGraph& g, int k) {
  nn::Vec in;
  const auto& zs = z[static_cast<size_t>(g.source_index(k))];
  const auto& zg = z[static_cast<size_t>(g.goal_index(k))];
  const auto& za = z[0];
  in.reserve(zs.size() + zg.size() + za.size());
  in.insert(in.end(), zs.begin(), zs.end());
  in.insert(in.end(), zg.begin(), zg.end());
  in.insert(in.end(), za.begin(), za.end());
  return in;
}

}  // namespace

std::map<int, double> q_values(const graph::GcnWeights& gcn, const nn::Mlp& head,
                               const graph::DirectedStateGraph& g) {
  auto z = graph::gcn_forward(g, gcn);
  std::map<int, double> out;
  for (int k = 0; k < g.object_count(); ++k) {
    int id = g.nodes[static_cast<size_t>(g.source_index(k))].object_id;
    out[id] = head.forward(head_input(z, g, k))[0];
  }
  return out;
}

int select_action(const std::map<int, double>& q, const std::vector<int>& valid, double epsilon,
                  Rng& rng) {
  if (valid.empty()) throw PlanError(Err::empty_valid_set, "select_action: no valid actions");
  std::vector<int> sorted = valid;
  std::sort(sorted.begin(), sorted.end());
  if (epsilon > 0 && rng.uniform() < epsilon) return sorted[rng.index(sorted.size())];
  int best = sorted.front();
  double best_q = q.at(best);
  for (int id : sorted)
    if (q.at(id) > best_q) {
      best = id;
      best_q = q.at(id);
    }
  return best;
}

double reward(const Outcome& outcome, const RlConfig& cfg) {
  double r = outcome.static_or_at_goal ? cfg.static_penalty : -static_cast<double>(outcome.traversal);
  if (outcome.completed) r += cfg.completion_bonus;
  return r;
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[write_] = std::move(t);
  }
  write_ = (write_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(size_t batch, Rng& rng) const {
  if (data_.empty()) throw PlanError(Err::buffer_underfull, "replay buffer is empty");
  std::vector<const Transition*> out;
  out.reserve(batch);
  for (size_t i = 0; i < batch; ++i) out.push_back(&data_[rng.index(data_.size())]);
  return out;
}

double td_term(double r, double gamma, double max_next_q, double q, bool terminal) {
  double target = r + (terminal ? 0.0 : gamma * max_next_q);
  double d = target - q;
  return 0.5 * d * d;
}

namespace {

double max_next_q(const QModel& m, const Transition& t) {
  if (t.terminal || t.next_valid.empty()) return 0.0;
  auto q = q_values(m.target_gcn, m.target_head, t.next);
  double best = -std::numeric_limits<double>::infinity();
  for (int id : t.next_valid) best = std::max(best, q.at(id));
  return best;
}

int greedy_action(const std::map<int, double>& q, const std::vector<int>& valid) {
  std::vector<int> sorted = valid;
  std::sort(sorted.begin(), sorted.end());
  int best = sorted.front();
  for (int id : sorted)
    if (q.at(id) > q.at(best)) best = id;
  return best;
}

}  // namespace

double td_loss(const QModel& m, const std::vector<const Transition*>& batch, double gamma) {
  if (batch.empty()) throw PlanError(Err::degenerate_input, "td_loss: empty batch");
  double total = 0;
  for (const Transition* t : batch) {
    auto q = q_values(m, t->state);
    total += td_term(t->reward, gamma, max_next_q(m, *t), q.at(t->action), t->terminal);
  }
  return total / static_cast<double>(batch.size());
}

double cql_from_parts(double mean_policy_q, double mean_dataset_q, double alpha, double td) {
  return alpha * (mean_policy_q - mean_dataset_q) + td;
}

double cql_loss(const QModel& m, const std::vector<const Transition*>& batch, double alpha,
                double gamma, double* td_out) {
  if (batch.empty()) throw PlanError(Err::degenerate_input, "cql_loss: empty batch");
  double td_total = 0, policy_q = 0, data_q = 0;
  for (const Transition* t : batch) {
    auto q = q_values(m, t->state);
    td_total += td_term(t->reward, gamma, max_next_q(m, *t), q.at(t->action), t->terminal);
    policy_q += q.at(greedy_action(q, t->valid));
    data_q += q.at(t->action);
  }
  double n = static_cast<double>(batch.size());
  if (td_out) *td_out = td_total / n;
  return cql_from_parts(policy_q / n, data_q / n, alpha, td_total / n);
}

Trainer::Trainer(QModel& model, const RlConfig& cfg) : model_(model), cfg_(cfg) {
  cfg_.validate();
  opt_.lr = cfg.lr;
}

TrainStats Trainer::step(const ReplayBuffer& buffer, Rng& rng) {
  if (buffer.size() < static_cast<size_t>(cfg_.batch_size))
    throw PlanError(Err::buffer_underfull, "train step needs a full batch");
  auto batch = buffer.sample(static_cast<size_t>(cfg_.batch_size), rng);

  graph::GcnWeights gcn_grads = model_.gcn.zeros_like();
  nn::Mlp head_grads = model_.q_head.zeros_like();
  const double n = static_cast<double>(batch.size());
  double td_total = 0, policy_total = 0, data_total = 0;

  for (const Transition* t : batch) {
    graph::GcnCache cache;
    auto z = graph::gcn_forward(t->state, model_.gcn, &cache);

    std::map<int, int> id_to_k;
    for (int k = 0; k < t->state.object_count(); ++k)
      id_to_k[t->state.nodes[static_cast<size_t>(t->state.source_index(k))].object_id] = k;

    std::map<int, double> q;
    for (int id : t->valid)
      q[id] = model_.q_head.forward(head_input(z, t->state, id_to_k.at(id)))[0];
    if (!q.count(t->action))
      q[t->action] = model_.q_head.forward(head_input(z, t->state, id_to_k.at(t->action)))[0];

    int a_star = greedy_action(q, t->valid);
    double q_data = q.at(t->action);
    double delta = t->reward + (t->terminal ? 0.0 : cfg_.gamma * max_next_q(model_, *t)) - q_data;
    td_total += 0.5 * delta * delta;
    policy_total += q.at(a_star);
    data_total += q_data;

    // dL/dQ(s,a_data) = (-delta + -alpha)/n ; dL/dQ(s,a*) = +alpha/n
    std::map<int, double> dq;
    dq[t->action] = (-delta - cfg_.alpha) / n;
    dq[a_star] += cfg_.alpha / n;

    std::vector<nn::Vec> dz(z.size(), nn::Vec(z[0].size(), 0.0));
    for (const auto& [id, g] : dq) {
      if (g == 0.0) continue;
      int k = id_to_k.at(id);
      nn::Mlp::Cache hc;
      nn::Vec in = head_input(z, t->state, k);
      model_.q_head.forward(in, &hc);
      nn::Vec din = model_.q_head.backward(hc, {g}, head_grads);
      const size_t hdim = z[0].size();
      for (size_t i = 0; i < hdim; ++i) {
        dz[static_cast<size_t>(t->state.source_index(k))][i] += din[i];
        dz[static_cast<size_t>(t->state.goal_index(k))][i] += din[hdim + i];
        dz[0][i] += din[2 * hdim + i];
      }
    }
    graph::gcn_backward(t->state, model_.gcn, cache, dz, gcn_grads);
  }

  std::vector<double*> params = graph::param_view(model_.gcn);
  auto head_params = nn::param_view(model_.q_head);
  params.insert(params.end(), head_params.begin(), head_params.end());
  std::vector<double> grads;
  grads.reserve(params.size());
  for (const double* p : graph::param_view(static_cast<const graph::GcnWeights&>(gcn_grads)))
    grads.push_back(*p);
  for (const double* p : nn::param_view(static_cast<const nn::Mlp&>(head_grads)))
    grads.push_back(*p);
  opt_.step(params, grads);

  model_.polyak(cfg_.tau);
  ++model_.train_steps_done;

  TrainStats stats;
  stats.td = td_total / n;
  stats.cql = cql_from_parts(policy_total / n, data_total / n, cfg_.alpha, stats.td);
  return stats;
}

double epsilon_at(const RlConfig& cfg, int64_t step) {
  double anneal_steps = cfg.epsilon_fraction * static_cast<double>(cfg.train_steps);
  if (anneal_steps <= 0) return cfg.epsilon_end;
  double f = std::min(1.0, static_cast<double>(step) / anneal_steps);
  return cfg.epsilon_start + f * (cfg.epsilon_end - cfg.epsilon_start);
}

int pick_heuristic(const GridMap& map, Cell agent, const std::vector<CandidateAction>& actions) {
  if (actions.empty()) throw PlanError(Err::empty_valid_set, "pick_heuristic: no actions");
  int best = -1;
  long best_cost = 0;
  for (const auto& a : actions) {
    int d1 = nav::distance(map, agent, a.source);
    int d2 = nav::distance(map, a.source, a.goal);
    long cost = (d1 < 0 || d2 < 0) ? static_cast<long>(map.width) * map.height * 4
                                   : static_cast<long>(d1) + d2;
    if (best < 0 || cost < best_cost || (cost == best_cost && a.id < best)) {
      best = a.id;
      best_cost = cost;
    }
  }
  return best;
}

int pick_uniform(const std::vector<int>& valid, Rng& rng) {
  if (valid.empty()) throw PlanError(Err::empty_valid_set, "pick_uniform: no actions");
  std::vector<int> sorted = valid;
  std::sort(sorted.begin(), sorted.end());
  return sorted[rng.index(sorted.size())];
}

std::optional<Cell> next_exploration_waypoint(const GridMap& map, const std::vector<uint8_t>& seen,
                                              Cell agent) {
  // BFS from the agent over free cells; the first never-seen free cell
  // popped is the nearest frontier target.
  std::vector<uint8_t> vis(map.cells.size(), 0);
  std::queue<Cell> q;
  if (!map.is_free(agent)) return std::nullopt;
  q.push(agent);
  vis[map.idx(agent)] = 1;
  while (!q.empty()) {
    Cell c = q.front();
    q.pop();
    if (!seen[map.idx(c)]) return c;
    for (Cell d : nav::neighbor_offsets()) {
      Cell n{c.x + d.x, c.y + d.y};
      if (map.is_free(n) && !vis[map.idx(n)]) {
        vis[map.idx(n)] = 1;
        q.push(n);
      }
    }
  }
  return std::nullopt;
}

}  // namespace rl
}  // namespace tidyplan
