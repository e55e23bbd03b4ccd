#include "tidyplan/config.hpp"

#include <fstream>

namespace tidyplan {
namespace harness {

using nlohmann::json;

namespace {

template <typename T>
void opt(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

void read_counts(const json& j, grid::GenConfig& g) {
  opt(j, "objects", g.n_objects);
  opt(j, "partially_occluded", g.n_partially_occluded);
  opt(j, "fully_occluded", g.n_fully_occluded);
  opt(j, "swap", g.n_swap);
  opt(j, "blocked_pairs", g.n_blocked_pairs);
  opt(j, "shuffled", g.n_shuffled);
}

}  // namespace

AppConfig config_from_json(const json& j) {
  AppConfig c;
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    opt(g, "width", c.gen.width);
    opt(g, "height", c.gen.height);
    opt(g, "cell_size", c.gen.cell_size);
  }
  if (j.contains("counts")) read_counts(j.at("counts"), c.gen);
  if (j.contains("perception")) {
    const auto& p = j.at("perception");
    opt(p, "radius", c.sense.radius);
    opt(p, "label_noise", c.sense.label_noise);
  }
  c.gen.sense_radius = c.sense.radius;
  if (j.contains("cem")) {
    const auto& e = j.at("cem");
    opt(e, "samples", c.cem.samples);
    opt(e, "elites", c.cem.elites);
    opt(e, "iterations", c.cem.iterations);
    opt(e, "std_floor", c.cem.std_floor);
  }
  if (j.contains("rl")) {
    const auto& r = j.at("rl");
    opt(r, "gamma", c.rl.gamma);
    opt(r, "alpha", c.rl.alpha);
    opt(r, "epsilon_start", c.rl.epsilon_start);
    opt(r, "epsilon_end", c.rl.epsilon_end);
    opt(r, "epsilon_fraction", c.rl.epsilon_fraction);
    opt(r, "tau", c.rl.tau);
    opt(r, "lr", c.rl.lr);
    opt(r, "batch_size", c.rl.batch_size);
    if (r.contains("buffer_capacity"))
      c.rl.buffer_capacity = r.at("buffer_capacity").get<size_t>();
    opt(r, "static_penalty", c.rl.static_penalty);
    opt(r, "completion_bonus", c.rl.completion_bonus);
    opt(r, "gcn_hidden", c.rl.gcn_hidden);
    opt(r, "gcn_depth", c.rl.gcn_depth);
    opt(r, "qhead_hidden", c.rl.qhead_hidden);
    opt(r, "train_steps", c.rl.train_steps);
    opt(r, "train_every", c.rl.train_every);
    opt(r, "step_cap_factor", c.rl.step_cap_factor);
  }
  if (j.contains("uodm")) {
    const auto& u = j.at("uodm");
    opt(u, "embed_dim", c.uodm_train.embed_dim);
    opt(u, "hidden", c.uodm_train.hidden);
    opt(u, "epochs", c.uodm_train.epochs);
    opt(u, "lr", c.uodm_train.lr);
    opt(u, "batch", c.uodm_train.batch);
    opt(u, "holdout_fraction", c.uodm_train.holdout_fraction);
    if (u.contains("seed")) c.uodm_train.seed = u.at("seed").get<uint64_t>();
  }
  opt(j, "prior_table", c.prior_table);
  if (j.contains("bench")) {
    const auto& b = j.at("bench");
    opt(b, "episodes", c.bench_episodes);
    if (b.contains("planners"))
      c.bench_planners = b.at("planners").get<std::vector<std::string>>();
    if (b.contains("suites")) {
      for (const auto& sj : b.at("suites")) {
        grid::GenConfig g = c.gen;
        read_counts(sj, g);
        if (sj.contains("width")) g.width = sj.at("width").get<int>();
        if (sj.contains("height")) g.height = sj.at("height").get<int>();
        c.bench_suites.push_back(g);
      }
    }
  }
  return c;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PlanError(Err::io_error, "cannot read config " + path);
  json j;
  in >> j;
  return config_from_json(j);
}

}  // namespace harness
}  // namespace tidyplan
