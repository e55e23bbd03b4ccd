#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "tidyplan/bench.hpp"
#include "tidyplan/config.hpp"
#include "tidyplan/episode.hpp"
#include "tidyplan/generator.hpp"
#include "tidyplan/scenario_io.hpp"
#include "tidyplan/train.hpp"
#include "tidyplan/uodm.hpp"

using namespace tidyplan;

namespace {

harness::AppConfig resolve_config(const std::string& path) {
  if (path.empty()) return harness::AppConfig{};
  return harness::load_config(path);
}

std::vector<uodm::OrrPair> resolve_table(const harness::AppConfig& cfg, const std::string& flag) {
  std::string path = !flag.empty() ? flag : cfg.prior_table;
  if (path.empty()) return uodm::builtin_prior_table();
  return uodm::load_prior_table(path);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw PlanError(Err::io_error, "cannot write " + path);
  out << content;
}

struct LoadedModels {
  std::optional<rl::QModel> q;
  std::optional<uodm::Models> discovery;
  harness::PlannerModels view() const {
    harness::PlannerModels m;
    if (q) m.q = &*q;
    if (discovery) m.discovery = &*discovery;
    return m;
  }
};

LoadedModels load_checkpoint_models(const std::string& path) {
  LoadedModels out;
  if (path.empty()) return out;
  auto c = ckpt::Checkpoint::load(path);
  if (c.has("uodm.embed_dim")) out.discovery = uodm::Models::from_checkpoint(c, "uodm");
  if (c.has("planner.gcn.layers")) {
    // reload through the model loader for the full section set
    out.q = rl::QModel::load(path);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grid-world multi-room rearrangement planner"};
  app.require_subcommand(1);

  std::string config_path, out_path, scenario_path, checkpoint_path, table_path, planner = "cql";
  std::string summary_path, curve_path;
  uint64_t seed = 0;
  bool timing = false;
  int jobs = 1;

  auto* gen = app.add_subcommand("generate", "write a scenario JSON file");
  gen->add_option("--seed", seed);
  gen->add_option("--config", config_path);
  gen->add_option("--out", out_path)->required();

  auto* tuodm = app.add_subcommand("train-uodm", "train the discovery networks on a prior table");
  tuodm->add_option("--seed", seed);
  tuodm->add_option("--config", config_path);
  tuodm->add_option("--table", table_path);
  tuodm->add_option("--out", out_path)->required();

  auto* tplan = app.add_subcommand("train-planner", "train the planner on generated scenarios");
  tplan->add_option("--seed", seed);
  tplan->add_option("--config", config_path);
  tplan->add_option("--checkpoint", checkpoint_path, "checkpoint holding discovery networks");
  tplan->add_option("--curve", curve_path, "training curve CSV path");
  tplan->add_option("--out", out_path)->required();

  auto* eval = app.add_subcommand("eval", "run one episode and write its trace");
  eval->add_option("--seed", seed);
  eval->add_option("--config", config_path);
  eval->add_option("--scenario", scenario_path, "scenario JSON (otherwise generated)");
  eval->add_option("--planner", planner)->check(CLI::IsMember({"cql", "hp", "rs", "ge"}));
  eval->add_option("--checkpoint", checkpoint_path);
  eval->add_option("--out", out_path);

  auto* bench = app.add_subcommand("bench", "run suites and write per-episode CSV");
  bench->add_option("--seed", seed);
  bench->add_option("--config", config_path);
  bench->add_option("--checkpoint", checkpoint_path);
  bench->add_option("--out", out_path)->required();
  bench->add_option("--summary", summary_path);
  bench->add_flag("--timing", timing, "fill the wall_ms column (breaks byte reproducibility)");
  bench->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto cfg = resolve_config(config_path);
      cfg.gen.seed = seed;
      Scenario s = grid::generate_scenario(cfg.gen);
      grid::save_scenario(s, out_path);
      std::cout << "wrote " << out_path << "\n";
    } else if (*tuodm) {
      auto cfg = resolve_config(config_path);
      if (seed != 0) cfg.uodm_train.seed = seed;
      auto table = resolve_table(cfg, table_path);
      uodm::TrainReport report;
      auto models = uodm::train_uodm(table, cfg.uodm_train, &report);
      models.save(out_path);
      std::cout << "holdout_accuracy=" << report.holdout_accuracy
                << " holdout_spearman=" << report.holdout_spearman << "\n"
                << "wrote " << out_path << "\n";
    } else if (*tplan) {
      auto cfg = resolve_config(config_path);
      std::optional<uodm::Models> discovery;
      if (!checkpoint_path.empty()) {
        discovery = uodm::Models::load(checkpoint_path);
      } else if (cfg.gen.n_partially_occluded + cfg.gen.n_fully_occluded > 0) {
        // scenarios hide objects; train the discovery stack on the spot
        auto table = resolve_table(cfg, table_path);
        discovery = uodm::train_uodm(table, cfg.uodm_train);
      }
      harness::EpisodeConfig ec;
      ec.sense = cfg.sense;
      ec.cem = cfg.cem;
      ec.rl = cfg.rl;
      auto result = harness::train_planner(cfg.gen, ec, discovery ? &*discovery : nullptr, seed);
      result.model.save(out_path);
      if (discovery) {
        // one unified checkpoint carrying both the planner and discovery nets
        auto merged = ckpt::Checkpoint::load(out_path);
        discovery->to_checkpoint(merged, "uodm");
        merged.save(out_path);
      }
      if (!curve_path.empty()) harness::save_curve_csv(result.curve, curve_path);
      std::cout << "episodes=" << result.episodes << " wrote " << out_path << "\n";
    } else if (*eval) {
      auto cfg = resolve_config(config_path);
      Scenario s;
      if (!scenario_path.empty()) {
        s = grid::load_scenario(scenario_path);
      } else {
        cfg.gen.seed = seed;
        s = grid::generate_scenario(cfg.gen);
      }
      auto models = load_checkpoint_models(checkpoint_path);
      harness::EpisodeConfig ec;
      ec.sense = cfg.sense;
      ec.cem = cfg.cem;
      ec.rl = cfg.rl;
      ec.seed = seed != 0 ? seed : s.seed;
      auto trace = harness::run_episode(s, harness::planner_from_string(planner), models.view(), ec);
      auto j = harness::trace_to_json(trace);
      if (!out_path.empty()) {
        write_file(out_path, j.dump(2) + "\n");
        std::cout << "wrote " << out_path << "\n";
      } else {
        std::cout << j.dump(2) << "\n";
      }
    } else if (*bench) {
      auto cfg = resolve_config(config_path);
      auto models = load_checkpoint_models(checkpoint_path);
      for (const auto& p : cfg.bench_planners) {
        if (p == "cql" && !models.q)
          throw PlanError(Err::missing_model, "bench includes cql but no planner checkpoint given");
      }
      auto result = harness::run_benchmark(cfg, models.view(), seed, timing, jobs);
      write_file(out_path, result.csv);
      if (!summary_path.empty()) write_file(summary_path, result.summary);
      std::cout << "wrote " << out_path << " (" << result.rows.size() << " rows)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
