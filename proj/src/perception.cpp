#include "tidyplan/perception.hpp"

#include <algorithm>
#include <cstdlib>

#include "tidyplan/nav.hpp"
#include "tidyplan/vocab.hpp"

namespace tidyplan {
namespace percep {

bool cell_in_view(const GridMap& map, Cell agent, Cell target, int radius) {
  double dx = agent.x - target.x;
  double dy = agent.y - target.y;
  if (dx * dx + dy * dy > static_cast<double>(radius) * radius) return false;
  return nav::line_unobstructed(map, agent, target);
}

bool object_in_view(const WorldState& state, int object_id, Cell agent, int radius) {
  if (state.hidden(object_id)) return false;
  for (Cell c : state.object_box(object_id).cells())
    if (cell_in_view(state.scenario->grid, agent, c, radius)) return true;
  return false;
}

Observation sense(const WorldState& state, Cell agent, const SenseConfig& cfg, Rng* noise_rng) {
  const Scenario& s = *state.scenario;
  Observation obs;
  int r = cfg.radius;
  for (int y = std::max(0, agent.y - r); y <= std::min(s.grid.height - 1, agent.y + r); ++y)
    for (int x = std::max(0, agent.x - r); x <= std::min(s.grid.width - 1, agent.x + r); ++x)
      if (cell_in_view(s.grid, agent, {x, y}, r)) obs.cells_seen.push_back({x, y});

  for (const auto& o : s.objects) {
    if (!object_in_view(state, o.id, agent, r)) continue;
    Cell pos = state.placements[static_cast<size_t>(o.id)].pos;
    std::string label = o.label;
    if (noise_rng && cfg.label_noise > 0.0 && noise_rng->uniform() < cfg.label_noise) {
      const auto& kinds = vocab::object_kinds();
      size_t pick = noise_rng->index(kinds.size() - 1);
      // skip the true label so a flip always changes it
      size_t own = 0;
      for (size_t i = 0; i < kinds.size(); ++i)
        if (kinds[i].label == o.label) own = i;
      if (pick >= own) ++pick;
      label = kinds[pick].label;
    }
    obs.objects_seen[o.id] = pos;
    obs.labels[o.id] = label;
  }
  obs.receptacle_open_state.reserve(state.open.size());
  for (uint8_t f : state.open) obs.receptacle_open_state.push_back(f);
  return obs;
}

std::vector<uint8_t> believed_free_map(const Knowledge& k, const WorldState& state) {
  const Scenario& s = *state.scenario;
  std::vector<uint8_t> free(s.grid.cells.size(), 0);
  for (size_t i = 0; i < s.grid.cells.size(); ++i) {
    CellTag t = s.grid.cells[i];
    if (t != CellTag::surface && t != CellTag::interior) continue;
    int rid = s.grid.owner[i];
    const auto& r = s.receptacles[static_cast<size_t>(rid)];
    if (r.openable && !(rid < static_cast<int>(k.open_known.size()) && k.open_known[static_cast<size_t>(rid)]))
      continue;  // closed interiors are not usable space yet
    free[i] = 1;
  }
  for (const auto& [id, pos] : k.visible) {
    const auto& o = s.objects[static_cast<size_t>(id)];
    for (Cell c : Rect{pos, o.fw, o.fh}.cells()) free[s.grid.idx(c)] = 0;
  }
  return free;
}

Knowledge initial_knowledge(const WorldState& state) {
  Knowledge k;
  const Scenario& s = *state.scenario;
  k.seen_cells.assign(s.grid.cells.size(), 0);
  k.open_known.assign(s.receptacles.size(), 0);
  for (const auto& r : s.receptacles) k.open_known[static_cast<size_t>(r.id)] = r.open ? 1 : 0;
  for (const auto& o : s.objects) k.unseen.insert(o.id);
  k.free_map = believed_free_map(k, state);
  return k;
}

namespace {

// A receptacle counts as inspected once its placement cells are all seen and
// none of them can hide anything (open or not openable). Inspected
// receptacles hold no unseen object, so they leave every candidate list.
void refresh_inspected(Knowledge& k, const WorldState& state) {
  const Scenario& s = *state.scenario;
  for (const auto& r : s.receptacles) {
    if (k.inspected.count(r.id)) continue;
    if (r.openable && !k.open_known[static_cast<size_t>(r.id)]) continue;
    bool all_seen = true;
    for (Cell c : r.cells)
      if (!k.seen_cells[s.grid.idx(c)]) {
        all_seen = false;
        break;
      }
    if (!all_seen) continue;
    k.inspected.insert(r.id);
    for (auto& [obj, list] : k.candidates)
      list.erase(std::remove(list.begin(), list.end(), r.id), list.end());
  }
}

}  // namespace

void update_knowledge(Knowledge& k, const Observation& obs, const WorldState& state) {
  for (Cell c : obs.cells_seen) k.seen_cells[state.scenario->grid.idx(c)] = 1;
  // open flags only change through the agent's own actions, so the
  // observation copy is always accurate
  for (size_t rid = 0; rid < obs.receptacle_open_state.size(); ++rid)
    k.open_known[rid] = obs.receptacle_open_state[rid];
  for (const auto& [id, pos] : obs.objects_seen) {
    if (k.unseen.erase(id)) {
      k.predicted.erase(id);
      k.candidates.erase(id);
    }
    k.visible[id] = pos;
    auto it = obs.labels.find(id);
    if (it != obs.labels.end() && !k.observed_labels.count(id)) k.observed_labels[id] = it->second;
  }
  refresh_inspected(k, state);
  k.free_map = believed_free_map(k, state);
}

std::vector<int> open_receptacle(WorldState& state, Knowledge& k, int receptacle_id,
                                 const SenseConfig& cfg, Rng* noise_rng) {
  const Scenario& s = *state.scenario;
  if (receptacle_id < 0 || receptacle_id >= static_cast<int>(s.receptacles.size()))
    throw PlanError(Err::degenerate_input, "open_receptacle: bad id");
  const auto& r = s.receptacles[static_cast<size_t>(receptacle_id)];
  if (!r.openable) throw PlanError(Err::not_openable, "open_receptacle: " + r.label);
  bool adjacent = false;
  for (Cell c : r.cells)
    if (std::abs(c.x - state.agent.x) + std::abs(c.y - state.agent.y) <= 1) adjacent = true;
  if (!adjacent) throw PlanError(Err::not_adjacent, "open_receptacle: agent not adjacent");
  state.open[static_cast<size_t>(receptacle_id)] = 1;
  k.open_known[static_cast<size_t>(receptacle_id)] = 1;

  std::vector<int> revealed;
  Observation obs = sense(state, state.agent, cfg, noise_rng);
  // contents may sit just out of ray reach from the agent's cell; make the
  // receptacle's own cells count as seen after an inspection at arm's length
  for (Cell c : r.cells) obs.cells_seen.push_back(c);
  for (const auto& o : s.objects) {
    if (k.visible.count(o.id) || obs.objects_seen.count(o.id)) continue;
    if (state.hidden(o.id)) continue;
    bool on_this = false;
    for (Cell c : state.object_box(o.id).cells())
      if (s.grid.owner_of(c) == receptacle_id) on_this = true;
    if (on_this) {
      obs.objects_seen[o.id] = state.placements[static_cast<size_t>(o.id)].pos;
      obs.labels[o.id] = o.label;
    }
  }
  for (const auto& [id, pos] : obs.objects_seen)
    if (k.unseen.count(id)) revealed.push_back(id);
  update_knowledge(k, obs, state);
  return revealed;
}

}  // namespace percep
}  // namespace tidyplan
