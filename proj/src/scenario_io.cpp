#include "tidyplan/scenario_io.hpp"

#include <fstream>

namespace tidyplan {
namespace grid {

using nlohmann::json;

namespace {

char tag_char(CellTag t) {
  switch (t) {
    case CellTag::free_floor: return '.';
    case CellTag::wall: return '#';
    case CellTag::surface: return 's';
    case CellTag::interior: return 'i';
  }
  return '.';
}

CellTag char_tag(char c) {
  switch (c) {
    case '.': return CellTag::free_floor;
    case '#': return CellTag::wall;
    case 's': return CellTag::surface;
    case 'i': return CellTag::interior;
  }
  throw PlanError(Err::io_error, std::string("bad map char: ") + c);
}

json cell_json(Cell c) { return json::array({c.x, c.y}); }
Cell cell_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

}  // namespace

json scenario_to_json(const Scenario& s) {
  json j;
  j["seed"] = s.seed;
  json rows = json::array();
  for (int y = 0; y < s.grid.height; ++y) {
    std::string row;
    row.reserve(static_cast<size_t>(s.grid.width));
    for (int x = 0; x < s.grid.width; ++x) row.push_back(tag_char(s.grid.tag({x, y})));
    rows.push_back(row);
  }
  j["grid"] = {{"width", s.grid.width},
               {"height", s.grid.height},
               {"cell_size", s.grid.cell_size},
               {"rows", rows}};
  j["rooms"] = json::array();
  for (const auto& r : s.rooms)
    j["rooms"].push_back({{"id", r.id},
                          {"kind", to_string(r.kind)},
                          {"region", {r.region.origin.x, r.region.origin.y, r.region.w, r.region.h}}});
  j["receptacles"] = json::array();
  for (const auto& r : s.receptacles) {
    json cells = json::array();
    for (Cell c : r.cells) cells.push_back(cell_json(c));
    j["receptacles"].push_back({{"id", r.id},
                                {"label", r.label},
                                {"room", r.room_id},
                                {"cells", cells},
                                {"openable", r.openable},
                                {"open", r.open},
                                {"centroid", cell_json(r.centroid)}});
  }
  j["objects"] = json::array();
  for (const auto& o : s.objects)
    j["objects"].push_back({{"id", o.id},
                            {"label", o.label},
                            {"footprint", {o.fw, o.fh}},
                            {"current", {{"pos", cell_json(o.current.pos)}, {"receptacle", o.current.receptacle}}},
                            {"goal", {{"pos", cell_json(o.goal_pos)}, {"receptacle", o.goal_receptacle}}}});
  j["agent_start"] = cell_json(s.agent_start);
  j["counts"] = {{"visible", s.counts.n_visible},
                 {"partially_occluded", s.counts.n_partially_occluded},
                 {"fully_occluded", s.counts.n_fully_occluded},
                 {"swap", s.counts.n_swap}};
  return j;
}

Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.seed = j.at("seed").get<uint64_t>();
  const auto& g = j.at("grid");
  s.grid = GridMap::blank(g.at("width").get<int>(), g.at("height").get<int>(),
                          g.at("cell_size").get<double>());
  const auto& rows = g.at("rows");
  for (int y = 0; y < s.grid.height; ++y) {
    const std::string row = rows.at(static_cast<size_t>(y)).get<std::string>();
    for (int x = 0; x < s.grid.width; ++x) s.grid.set({x, y}, char_tag(row.at(static_cast<size_t>(x))));
  }
  for (const auto& rj : j.at("rooms")) {
    Room r;
    r.id = rj.at("id").get<int>();
    r.kind = room_kind_from_string(rj.at("kind").get<std::string>());
    const auto& reg = rj.at("region");
    r.region = Rect{{reg.at(0).get<int>(), reg.at(1).get<int>()}, reg.at(2).get<int>(), reg.at(3).get<int>()};
    s.rooms.push_back(std::move(r));
  }
  for (const auto& rj : j.at("receptacles")) {
    Receptacle r;
    r.id = rj.at("id").get<int>();
    r.label = rj.at("label").get<std::string>();
    r.room_id = rj.at("room").get<int>();
    for (const auto& cj : rj.at("cells")) r.cells.push_back(cell_from(cj));
    r.openable = rj.at("openable").get<bool>();
    r.open = rj.at("open").get<bool>();
    r.centroid = cell_from(rj.at("centroid"));
    for (Cell c : r.cells) s.grid.owner[s.grid.idx(c)] = static_cast<int16_t>(r.id);
    s.receptacles.push_back(std::move(r));
  }
  for (const auto& oj : j.at("objects")) {
    ObjectInstance o;
    o.id = oj.at("id").get<int>();
    o.label = oj.at("label").get<std::string>();
    o.fw = oj.at("footprint").at(0).get<int>();
    o.fh = oj.at("footprint").at(1).get<int>();
    o.current.pos = cell_from(oj.at("current").at("pos"));
    o.current.receptacle = oj.at("current").at("receptacle").get<int>();
    o.goal_pos = cell_from(oj.at("goal").at("pos"));
    o.goal_receptacle = oj.at("goal").at("receptacle").get<int>();
    s.objects.push_back(std::move(o));
  }
  s.agent_start = cell_from(j.at("agent_start"));
  const auto& c = j.at("counts");
  s.counts = {c.at("visible").get<int>(), c.at("partially_occluded").get<int>(),
              c.at("fully_occluded").get<int>(), c.at("swap").get<int>()};
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw PlanError(Err::io_error, "cannot write " + path);
  out << scenario_to_json(s).dump(2) << "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PlanError(Err::io_error, "cannot read " + path);
  json j;
  in >> j;
  return scenario_from_json(j);
}

}  // namespace grid
}  // namespace tidyplan
