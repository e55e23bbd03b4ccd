#include "tidyplan/episode.hpp"

#include <algorithm>

#include "tidyplan/nav.hpp"

namespace tidyplan {
namespace harness {

std::string to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::cql: return "cql";
    case PlannerKind::heuristic: return "hp";
    case PlannerKind::random_search: return "rs";
    case PlannerKind::greedy_exploration: return "ge";
  }
  return "cql";
}

PlannerKind planner_from_string(const std::string& s) {
  if (s == "cql") return PlannerKind::cql;
  if (s == "hp") return PlannerKind::heuristic;
  if (s == "rs") return PlannerKind::random_search;
  if (s == "ge") return PlannerKind::greedy_exploration;
  throw PlanError(Err::degenerate_input, "unknown planner: " + s);
}

Metrics compute_metrics(const EpisodeTrace& t) {
  Metrics m;
  int n_s = static_cast<int>(t.records.size());
  if (n_s == 0) {
    m.srn = t.n_objects == 0 ? 1.0 : 0.0;
  } else {
    m.srn = (t.success ? 1.0 : 0.0) * static_cast<double>(t.n_objects) / n_s;
  }
  if (t.discovery_attempts > 0)
    m.eod = static_cast<double>(t.unseen_initial) / t.discovery_attempts;
  m.ttl = static_cast<double>(t.total_traversal) * t.cell_size;
  return m;
}

EpisodeDriver::EpisodeDriver(const Scenario& s, PlannerKind kind, const PlannerModels& models,
                             const EpisodeConfig& cfg)
    : scenario_(s),
      kind_(kind),
      models_(models),
      cfg_(cfg),
      world_(s),
      env_rng_(Rng(cfg.seed).fork(101)),
      noise_rng_(Rng(cfg.seed).fork(103)) {
  if ((kind == PlannerKind::cql && !models_.q) ||
      ((kind == PlannerKind::cql || kind == PlannerKind::heuristic) && !models_.discovery &&
       s.counts.n_partially_occluded + s.counts.n_fully_occluded > 0))
    throw PlanError(Err::missing_model, "planner requires a trained model");
  knowledge_ = percep::initial_knowledge(world_);
  step_cap_ = cfg.rl.step_cap_factor * std::max(1, static_cast<int>(s.objects.size()));
  trace_.scenario_seed = s.seed;
  trace_.planner = to_string(kind);
  trace_.n_objects = static_cast<int>(s.objects.size());
  trace_.cell_size = s.grid.cell_size;
  sense_update();
  trace_.unseen_initial = static_cast<int>(knowledge_.unseen.size());
  if (kind_ == PlannerKind::greedy_exploration) run_exploration_phase();
}

void EpisodeDriver::sense_update() {
  auto obs = percep::sense(world_, world_.agent, cfg_.sense, &noise_rng_);
  percep::update_knowledge(knowledge_, obs, world_);
}

void EpisodeDriver::walk(const std::vector<Cell>& cells, int abort_when_seen, bool* aborted,
                         int* walked) {
  if (aborted) *aborted = false;
  int steps = 0;
  for (Cell c : cells) {
    if (!scenario_.grid.is_free(c)) continue;  // virtual endpoint reach-in
    if (c == world_.agent) continue;
    world_.agent = c;
    ++steps;
    sense_update();
    if (abort_when_seen >= 0 && knowledge_.visible.count(abort_when_seen)) {
      if (aborted) *aborted = true;
      break;
    }
  }
  if (walked) *walked = steps;
}

void EpisodeDriver::run_exploration_phase() {
  // coverage-first: visit nearest never-seen free cells until everything
  // reachable was sensed; one discovery attempt per waypoint while a
  // discoverable object is still out there
  while (true) {
    auto wp = rl::next_exploration_waypoint(scenario_.grid, knowledge_.seen_cells, world_.agent);
    if (!wp) break;
    if (static_cast<int>(trace_.records.size()) >= step_cap_) break;
    bool discoverable = false;
    for (int id : knowledge_.unseen)
      if (!world_.hidden(id)) discoverable = true;
    auto path = nav::shortest_path(scenario_.grid, world_.agent, *wp);
    if (!path.reachable) break;
    size_t before = knowledge_.visible.size();
    int walked = 0;
    walk(path.cells, -1, nullptr, &walked);
    knowledge_.seen_cells[scenario_.grid.idx(*wp)] = 1;  // reached even if zero-length
    TraceRecord rec;
    rec.kind = "search";
    rec.object = -1;
    rec.traversal = walked;
    rec.discovery_attempt = discoverable;
    rec.discovered = knowledge_.visible.size() > before;
    if (rec.discovery_attempt) ++knowledge_.discovery_attempts;
    trace_.records.push_back(rec);
    trace_.total_traversal += rec.traversal;
  }
  for (int id : knowledge_.unseen) knowledge_.unfindable.insert(id);
  explored_ = true;
}

void EpisodeDriver::refresh_predictions() {
  switch (kind_) {
    case PlannerKind::cql:
    case PlannerKind::heuristic:
      if (models_.discovery) uodm::predict_locations(*models_.discovery, knowledge_, scenario_);
      break;
    case PlannerKind::random_search:
      for (int id : knowledge_.unseen) {
        if (knowledge_.unfindable.count(id)) continue;
        auto it = knowledge_.candidates.find(id);
        if (it == knowledge_.candidates.end()) {
          std::vector<int> all;
          for (const auto& r : scenario_.receptacles)
            if (!knowledge_.inspected.count(r.id)) all.push_back(r.id);
          env_rng_.shuffle(all);  // uniform order = uniform draws without replacement
          it = knowledge_.candidates.emplace(id, std::move(all)).first;
        }
        if (it->second.empty()) {
          knowledge_.unfindable.insert(id);
          knowledge_.predicted.erase(id);
          continue;
        }
        int rid = it->second.front();
        knowledge_.predicted[id] = {rid, scenario_.receptacles[static_cast<size_t>(rid)].centroid};
      }
      break;
    case PlannerKind::greedy_exploration:
      break;  // no receptacle predictions; discovery happened up front
  }
}

bool EpisodeDriver::begin_iteration() {
  if (static_cast<int>(trace_.records.size()) >= step_cap_) return false;
  refresh_predictions();
  collision::resolve_collisions(knowledge_, scenario_, cfg_.cem, env_rng_);

  valid_.clear();
  for (const auto& o : scenario_.objects) {
    if (knowledge_.unfindable.count(o.id)) continue;
    auto vis = knowledge_.visible.find(o.id);
    if (vis != knowledge_.visible.end()) {
      if (vis->second == o.goal_pos) continue;  // already tidy
      auto rg = knowledge_.resolved_goals.find(o.id);
      if (rg != knowledge_.resolved_goals.end() && rg->second == vis->second)
        continue;  // temporarily static
      valid_.push_back(o.id);
    } else if (knowledge_.predicted.count(o.id)) {
      valid_.push_back(o.id);
    }
  }
  if (valid_.empty()) return false;
  graph_ = graph::build_graph(graph::inputs_from_knowledge(knowledge_, scenario_), world_.agent,
                              scenario_.grid);
  return true;
}

std::vector<rl::CandidateAction> EpisodeDriver::candidate_actions() const {
  std::vector<rl::CandidateAction> out;
  for (int id : valid_) {
    const auto& o = scenario_.objects[static_cast<size_t>(id)];
    rl::CandidateAction a;
    a.id = id;
    auto vis = knowledge_.visible.find(id);
    a.source = vis != knowledge_.visible.end() ? vis->second : knowledge_.predicted.at(id).pos;
    auto rg = knowledge_.resolved_goals.find(id);
    a.goal = rg != knowledge_.resolved_goals.end() ? rg->second : o.goal_pos;
    out.push_back(a);
  }
  return out;
}

rl::Outcome EpisodeDriver::execute(int object_id) {
  const auto& o = scenario_.objects[static_cast<size_t>(object_id)];
  rl::Outcome outcome;
  TraceRecord rec;
  rec.object = object_id;

  auto resolved_dest = [&]() -> Cell {
    auto rg = knowledge_.resolved_goals.find(object_id);
    return rg != knowledge_.resolved_goals.end() ? rg->second : o.goal_pos;
  };
  auto dest_feasible = [&](Cell pos) {
    Rect box{pos, o.fw, o.fh};
    for (Cell c : box.cells()) {
      if (!scenario_.grid.is_receptacle_cell(c)) return false;
      for (size_t k = 0; k < world_.placements.size(); ++k)
        if (static_cast<int>(k) != object_id && world_.object_box(static_cast<int>(k)).contains(c))
          return false;
    }
    return true;
  };

  auto place = [&](Cell from_pos, Cell dest) -> bool {
    // walk to the object, re-check the destination, then carry it over
    auto leg1 = nav::shortest_path(scenario_.grid, world_.agent, from_pos);
    if (!leg1.reachable) return false;
    walk(leg1.cells, -1, nullptr, nullptr);
    rec.traversal += leg1.length;
    if (!dest_feasible(dest)) return false;  // blocked by something newly discovered
    auto leg2 = nav::shortest_path(scenario_.grid, from_pos, dest);
    if (!leg2.reachable) return false;
    grid::apply_pick_place(world_, object_id, {dest, scenario_.grid.owner_of(dest)});
    walk(leg2.cells, -1, nullptr, nullptr);
    rec.traversal += leg2.length;
    sense_update();
    return true;
  };

  if (knowledge_.visible.count(object_id)) {
    rec.kind = "pick-place";
    Cell cur = knowledge_.visible.at(object_id);
    Cell dest = resolved_dest();
    outcome.static_or_at_goal = cur == o.goal_pos;
    if (!outcome.static_or_at_goal) place(cur, dest);
  } else {
    // search the predicted receptacle
    auto pred = knowledge_.predicted.at(object_id);
    const auto& recep = scenario_.receptacles[static_cast<size_t>(pred.receptacle)];
    rec.kind = "search";
    auto path = nav::shortest_path(scenario_.grid, world_.agent, recep.centroid);
    bool aborted = false;
    int walked = 0;
    if (path.reachable) {
      walk(path.cells, object_id, &aborted, &walked);
      rec.traversal += aborted ? walked : path.length;
    }
    if (aborted) {
      // found on the way; the receptacle keeps its candidate standing
      rec.discovered = true;
    } else {
      rec.discovery_attempt = true;
      if (recep.openable && !world_.receptacle_open(pred.receptacle)) {
        rec.kind = "open";
        percep::open_receptacle(world_, knowledge_, pred.receptacle, cfg_.sense, &noise_rng_);
      } else {
        auto obs = percep::sense(world_, world_.agent, cfg_.sense, &noise_rng_);
        for (Cell c : recep.cells) obs.cells_seen.push_back(c);
        percep::update_knowledge(knowledge_, obs, world_);
      }
      if (knowledge_.visible.count(object_id)) {
        // found at the predicted receptacle: one attempt, then pick-place
        ++knowledge_.discovery_attempts;
        rec.discovered = true;
        Cell cur = knowledge_.visible.at(object_id);
        outcome.static_or_at_goal = cur == o.goal_pos;
        if (!outcome.static_or_at_goal) {
          Cell dest = resolved_dest();
          if (dest_feasible(dest)) place(cur, dest);
        }
      } else {
        uodm::prune_candidate(knowledge_, object_id, pred.receptacle, scenario_);
      }
    }
  }

  outcome.traversal = rec.traversal;
  bool done_all = knowledge_.unfindable.empty();
  for (const auto& obj : scenario_.objects) {
    if (!knowledge_.visible.count(obj.id) || !world_.at_goal(obj.id)) {
      done_all = false;
      break;
    }
  }
  outcome.completed = done_all;
  trace_.records.push_back(rec);
  trace_.total_traversal += rec.traversal;
  return outcome;
}

bool EpisodeDriver::exhausted() const {
  for (const auto& o : scenario_.objects) {
    auto vis = knowledge_.visible.find(o.id);
    if (vis != knowledge_.visible.end()) {
      if (vis->second != o.goal_pos) return false;
    } else if (!knowledge_.unfindable.count(o.id)) {
      return false;
    }
  }
  return true;
}

bool EpisodeDriver::success() const {
  return world_.all_at_goal() && knowledge_.unfindable.empty();
}

EpisodeTrace EpisodeDriver::take_trace() {
  trace_.success = success();
  trace_.discovery_attempts = knowledge_.discovery_attempts;
  return trace_;
}

namespace {

int choose_action(EpisodeDriver& d, PlannerKind kind, const PlannerModels& models, Rng& policy_rng) {
  switch (kind) {
    case PlannerKind::cql: {
      auto q = rl::q_values(*models.q, d.state_graph());
      return rl::select_action(q, d.valid(), 0.0, policy_rng);
    }
    case PlannerKind::heuristic:
    case PlannerKind::greedy_exploration:
      return rl::pick_heuristic(d.world().scenario->grid, d.world().agent, d.candidate_actions());
    case PlannerKind::random_search:
      return rl::pick_uniform(d.valid(), policy_rng);
  }
  throw PlanError(Err::degenerate_input, "unknown planner");
}

}  // namespace

EpisodeTrace run_episode(const Scenario& s, PlannerKind kind, const PlannerModels& models,
                         const EpisodeConfig& cfg) {
  EpisodeDriver driver(s, kind, models, cfg);
  Rng policy_rng = Rng(cfg.seed).fork(202);
  while (driver.begin_iteration()) {
    int action = choose_action(driver, kind, models, policy_rng);
    driver.execute(action);
  }
  return driver.take_trace();
}

EpisodeTrace replay_trace(const Scenario& s, PlannerKind kind, const PlannerModels& models,
                          const EpisodeConfig& cfg, const std::vector<int>& actions) {
  EpisodeDriver driver(s, kind, models, cfg);
  size_t i = 0;
  while (driver.begin_iteration() && i < actions.size()) {
    driver.execute(actions[i]);
    ++i;
  }
  return driver.take_trace();
}

nlohmann::json trace_to_json(const EpisodeTrace& t) {
  nlohmann::json j;
  j["scenario_seed"] = t.scenario_seed;
  j["planner"] = t.planner;
  j["success"] = t.success;
  j["steps"] = t.records.size();
  j["discovery_attempts"] = t.discovery_attempts;
  j["unseen_initial"] = t.unseen_initial;
  j["total_traversal_cells"] = t.total_traversal;
  j["records"] = nlohmann::json::array();
  for (const auto& r : t.records)
    j["records"].push_back({{"kind", r.kind},
                            {"object", r.object},
                            {"traversal", r.traversal},
                            {"discovery_attempt", r.discovery_attempt},
                            {"discovered", r.discovered}});
  Metrics m = compute_metrics(t);
  j["metrics"] = {{"srn", m.srn}, {"ttl", m.ttl}};
  if (m.eod)
    j["metrics"]["eod"] = *m.eod;
  else
    j["metrics"]["eod"] = "NC";
  return j;
}

}  // namespace harness
}  // namespace tidyplan
