#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tidyplan/collision.hpp"
#include "tidyplan/generator.hpp"
#include "tidyplan/perception.hpp"
#include "tidyplan/rlplanner.hpp"
#include "tidyplan/uodm.hpp"

namespace tidyplan {
namespace harness {

struct AppConfig {
  grid::GenConfig gen;
  percep::SenseConfig sense;
  collision::CemParams cem;
  rl::RlConfig rl;
  uodm::TrainConfig uodm_train;
  std::string prior_table;  // empty = built-in table
  int bench_episodes = 20;
  std::vector<std::string> bench_planners{"cql", "hp", "rs", "ge"};
  std::vector<grid::GenConfig> bench_suites;  // defaults to [gen] when empty
};

AppConfig config_from_json(const nlohmann::json& j);
AppConfig load_config(const std::string& path);

}  // namespace harness
}  // namespace tidyplan
