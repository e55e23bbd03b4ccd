#include "tidyplan/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

namespace tidyplan {
namespace harness {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

BenchResult run_benchmark(const AppConfig& cfg, const PlannerModels& models, uint64_t seed,
                          bool timing, int jobs) {
  std::vector<grid::GenConfig> suites = cfg.bench_suites;
  if (suites.empty()) suites.push_back(cfg.gen);

  struct Task {
    size_t suite;
    std::string planner;
    int episode;
    uint64_t scenario_seed;
  };
  std::vector<Task> tasks;
  for (size_t si = 0; si < suites.size(); ++si)
    for (const auto& planner : cfg.bench_planners)
      for (int e = 0; e < cfg.bench_episodes; ++e) {
        uint64_t sseed = Rng::splitmix(seed ^ Rng::splitmix((si << 20) + static_cast<uint64_t>(e)));
        tasks.push_back({si, planner, e, sseed});
      }

  std::vector<BenchRow> rows(tasks.size());
  auto worker = [&](size_t begin, size_t step) {
    for (size_t ti = begin; ti < tasks.size(); ti += step) {
      const Task& task = tasks[ti];
      grid::GenConfig gc = suites[task.suite];
      gc.seed = task.scenario_seed;
      Scenario s = grid::generate_scenario(gc);
      EpisodeConfig ec;
      ec.sense = cfg.sense;
      ec.cem = cfg.cem;
      ec.rl = cfg.rl;
      ec.seed = task.scenario_seed;
      auto t0 = std::chrono::steady_clock::now();
      EpisodeTrace trace = run_episode(s, planner_from_string(task.planner), models, ec);
      auto t1 = std::chrono::steady_clock::now();
      Metrics m = compute_metrics(trace);
      BenchRow row;
      row.planner = task.planner;
      row.n_objects = gc.n_objects;
      row.po = gc.n_partially_occluded;
      row.fo = gc.n_fully_occluded;
      row.swaps = gc.n_swap;
      row.seed = task.scenario_seed;
      row.success = trace.success ? 1 : 0;
      row.srn = m.srn;
      row.eod_nc = !m.eod.has_value();
      row.eod = m.eod.value_or(0.0);
      row.ttl = m.ttl;
      if (timing)
        row.wall_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
      rows[ti] = std::move(row);
    }
  };
  if (jobs <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker, static_cast<size_t>(j), static_cast<size_t>(jobs));
    for (auto& t : pool) t.join();
  }

  BenchResult out;
  out.csv = "planner,n_objects,po,fo,swaps,seed,success,srn,eod,ttl,wall_ms\n";
  for (const auto& r : rows) {
    out.csv += r.planner + "," + std::to_string(r.n_objects) + "," + std::to_string(r.po) + "," +
               std::to_string(r.fo) + "," + std::to_string(r.swaps) + "," + std::to_string(r.seed) +
               "," + std::to_string(r.success) + "," + fmt(r.srn) + "," +
               (r.eod_nc ? std::string("NC") : fmt(r.eod)) + "," + fmt(r.ttl) + "," +
               (r.wall_ms < 0 ? std::string() : std::to_string(r.wall_ms)) + "\n";
  }

  // aggregate mean/std per (suite, planner)
  out.summary = "n_objects,po,fo,swaps,planner,episodes,success_rate,srn_mean,srn_std,eod_mean,eod_std,ttl_mean,ttl_std\n";
  for (size_t si = 0; si < suites.size(); ++si) {
    for (const auto& planner : cfg.bench_planners) {
      std::vector<const BenchRow*> group;
      for (size_t ti = 0; ti < tasks.size(); ++ti)
        if (tasks[ti].suite == si && tasks[ti].planner == planner) group.push_back(&rows[ti]);
      if (group.empty()) continue;
      auto mean_std = [&](auto getter, auto filter) {
        double sum = 0, sum2 = 0;
        int n = 0;
        for (const BenchRow* r : group) {
          if (!filter(*r)) continue;
          double v = getter(*r);
          sum += v;
          sum2 += v * v;
          ++n;
        }
        if (n == 0) return std::pair<double, double>{NAN, NAN};
        double mean = sum / n;
        double var = std::max(0.0, sum2 / n - mean * mean);
        return std::pair<double, double>{mean, std::sqrt(var)};
      };
      auto all = [](const BenchRow&) { return true; };
      auto [srn_m, srn_s] = mean_std([](const BenchRow& r) { return r.srn; }, all);
      auto [eod_m, eod_s] =
          mean_std([](const BenchRow& r) { return r.eod; }, [](const BenchRow& r) { return !r.eod_nc; });
      auto [ttl_m, ttl_s] = mean_std([](const BenchRow& r) { return r.ttl; }, all);
      auto [suc_m, suc_s] = mean_std([](const BenchRow& r) { return static_cast<double>(r.success); }, all);
      const auto& g = suites[si];
      out.summary += std::to_string(g.n_objects) + "," + std::to_string(g.n_partially_occluded) +
                     "," + std::to_string(g.n_fully_occluded) + "," + std::to_string(g.n_swap) +
                     "," + planner + "," + std::to_string(group.size()) + "," + fmt(suc_m) + "," +
                     fmt(srn_m) + "," + fmt(srn_s) + "," +
                     (std::isnan(eod_m) ? std::string("NC") : fmt(eod_m)) + "," +
                     (std::isnan(eod_s) ? std::string("NC") : fmt(eod_s)) + "," + fmt(ttl_m) + "," +
                     fmt(ttl_s) + "\n";
      (void)suc_s;
    }
  }
  out.rows = std::move(rows);
  return out;
}

}  // namespace harness
}  // namespace tidyplan
