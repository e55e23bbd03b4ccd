#pragma once

#include <string>

#include <json.hpp>

#include "tidyplan/gridmap.hpp"

namespace tidyplan {
namespace grid {

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace grid
}  // namespace tidyplan
