#pragma once

#include <string>
#include <vector>

#include "tidyplan/episode.hpp"
#include "tidyplan/generator.hpp"
#include "tidyplan/rlplanner.hpp"
#include "tidyplan/uodm.hpp"

namespace tidyplan {
namespace harness {

struct CurvePoint {
  int64_t step = 0;
  double td = 0.0;
  double cql = 0.0;
  double mean_episode_reward = 0.0;
};

struct TrainPlannerResult {
  rl::QModel model;
  std::vector<CurvePoint> curve;
  int episodes = 0;
};

// Online off-policy training: epsilon-greedy rollouts on freshly generated
// scenarios feed the replay buffer, one gradient step per environment step
// once a batch is available, target weights tracked by polyak averaging.
TrainPlannerResult train_planner(const grid::GenConfig& scenario_cfg, const EpisodeConfig& episode_cfg,
                                 const uodm::Models* discovery, uint64_t seed, int log_every = 500);

void save_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path);

}  // namespace harness
}  // namespace tidyplan
