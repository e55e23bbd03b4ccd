#pragma once

#include <string>
#include <vector>

#include "tidyplan/config.hpp"
#include "tidyplan/episode.hpp"

namespace tidyplan {
namespace harness {

struct BenchRow {
  std::string planner;
  int n_objects = 0;
  int po = 0;
  int fo = 0;
  int swaps = 0;
  uint64_t seed = 0;
  int success = 0;
  double srn = 0;
  bool eod_nc = true;
  double eod = 0;
  double ttl = 0;
  long wall_ms = -1;  // -1 = not measured
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::string csv;      // per-episode rows
  std::string summary;  // per (suite, planner) aggregates
};

// Every (suite x planner x episode seed) combination, deterministic row
// order. Wall time stays blank unless requested so reruns are byte-equal.
BenchResult run_benchmark(const AppConfig& cfg, const PlannerModels& models, uint64_t seed,
                          bool timing = false, int jobs = 1);

}  // namespace harness
}  // namespace tidyplan
