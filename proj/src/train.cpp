#include "tidyplan/train.hpp"

#include <fstream>
#include <memory>

namespace tidyplan {
namespace harness {

TrainPlannerResult train_planner(const grid::GenConfig& scenario_cfg, const EpisodeConfig& episode_cfg,
                                 const uodm::Models* discovery, uint64_t seed, int log_every) {
  const rl::RlConfig& rc = episode_cfg.rl;
  rc.validate();
  Rng init_rng = Rng(seed).fork(7);
  TrainPlannerResult out;
  out.model = rl::QModel::init(rc, init_rng);
  rl::Trainer trainer(out.model, rc);
  rl::ReplayBuffer buffer(rc.buffer_capacity);
  Rng sample_rng = Rng(seed).fork(11);
  Rng policy_rng = Rng(seed).fork(13);

  PlannerModels models;
  models.q = &out.model;
  models.discovery = discovery;

  std::unique_ptr<Scenario> scenario;
  std::unique_ptr<EpisodeDriver> driver;
  double episode_reward = 0;
  std::vector<double> finished_rewards;
  auto new_episode = [&]() {
    grid::GenConfig gc = scenario_cfg;
    gc.seed = Rng::splitmix(seed ^ (0xabcdefull + 0x9e3779b9ull * static_cast<uint64_t>(out.episodes)));
    scenario = std::make_unique<Scenario>(grid::generate_scenario(gc));
    EpisodeConfig ec = episode_cfg;
    ec.seed = gc.seed;
    driver = std::make_unique<EpisodeDriver>(*scenario, PlannerKind::cql, models, ec);
    episode_reward = 0;
    ++out.episodes;
  };
  new_episode();

  double stat_td = 0, stat_cql = 0;
  int stat_n = 0;
  bool has_state = driver->begin_iteration();
  for (int64_t step = 0; step < rc.train_steps; ++step) {
    int fresh_tries = 0;
    while (!has_state) {
      finished_rewards.push_back(episode_reward);
      new_episode();
      has_state = driver->begin_iteration();
      if (++fresh_tries > 16)
        throw PlanError(Err::degenerate_input, "training scenarios produce no actions");
    }
    rl::Transition t;
    t.state = driver->state_graph();
    t.valid = driver->valid();
    double eps = rl::epsilon_at(rc, step);
    auto q = rl::q_values(*models.q, t.state);
    t.action = rl::select_action(q, t.valid, eps, policy_rng);
    auto outcome = driver->execute(t.action);
    t.reward = rl::reward(outcome, rc);
    episode_reward += t.reward;
    // the next iteration's state doubles as the bootstrap target
    has_state = driver->begin_iteration();
    if (has_state) {
      t.next = driver->state_graph();
      t.next_valid = driver->valid();
      t.terminal = false;
    } else {
      t.terminal = true;
    }
    buffer.push(std::move(t));

    if (buffer.size() >= static_cast<size_t>(rc.batch_size) && step % rc.train_every == 0) {
      auto stats = trainer.step(buffer, sample_rng);
      stat_td += stats.td;
      stat_cql += stats.cql;
      ++stat_n;
    }
    if (log_every > 0 && (step + 1) % log_every == 0 && stat_n > 0) {
      double mean_r = 0;
      if (!finished_rewards.empty()) {
        for (double r : finished_rewards) mean_r += r;
        mean_r /= static_cast<double>(finished_rewards.size());
      }
      out.curve.push_back({step + 1, stat_td / stat_n, stat_cql / stat_n, mean_r});
      stat_td = stat_cql = 0;
      stat_n = 0;
      finished_rewards.clear();
    }
  }
  return out;
}

void save_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw PlanError(Err::io_error, "cannot write " + path);
  out << "step,td_loss,cql_loss,mean_episode_reward\n";
  char buf[128];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof(buf), "%lld,%.6f,%.6f,%.6f\n", static_cast<long long>(p.step), p.td,
                  p.cql, p.mean_episode_reward);
    out << buf;
  }
}

}  // namespace harness
}  // namespace tidyplan
