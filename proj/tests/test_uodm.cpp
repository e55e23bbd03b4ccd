#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "tidyplan/embedding.hpp"
#include "tidyplan/generator.hpp"
#include "tidyplan/perception.hpp"
#include "tidyplan/uodm.hpp"
#include "tidyplan/vocab.hpp"

using namespace tidyplan;

TEST_CASE("pair embeddings are deterministic and unit norm") {
  auto a = embed::embed_orr("apple", "kitchen|fridge");
  auto b = embed::embed_orr("apple", "kitchen|fridge");
  CHECK(a == b);
  double norm = 0;
  for (double v : a) norm += v * v;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distinct pairs never collide across the full vocabulary") {
  std::set<std::vector<double>> seen;
  size_t pairs = 0;
  for (const auto& o : vocab::object_kinds())
    for (const auto& r : vocab::receptacle_kinds()) {
      seen.insert(embed::embed_orr(o.label, r.label));
      ++pairs;
    }
  CHECK(pairs == 640);
  CHECK(seen.size() == pairs);
}

TEST_CASE("empty labels are rejected") {
  CHECK_THROWS_AS(embed::embed_orr("", "x"), PlanError);
  CHECK_THROWS_AS(embed::embed_orr("x", ""), PlanError);
}

TEST_CASE("cross entropy matches analytic values") {
  // perfect one-hot prediction on the true class
  CHECK(uodm::filter_loss({{1.0, 0.0}}, {0}) == doctest::Approx(0.0).epsilon(1e-12));
  // uniform prediction costs ln 2
  CHECK(uodm::filter_loss({{0.5, 0.5}}, {1}) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(uodm::filter_loss({{0.5, 0.5}}, {1}) == doctest::Approx(0.6931).epsilon(1e-4));
  // batch of two averages the per-example losses
  double l1 = uodm::filter_loss({{0.9, 0.1}}, {0});
  double l2 = uodm::filter_loss({{0.3, 0.7}}, {0});
  CHECK(uodm::filter_loss({{0.9, 0.1}, {0.3, 0.7}}, {0, 0}) ==
        doctest::Approx((l1 + l2) / 2).epsilon(1e-12));
  // zero probability on the true class stays finite via the clamp
  CHECK(std::isfinite(uodm::filter_loss({{0.0, 1.0}}, {0})));
}

TEST_CASE("mse matches analytic values") {
  CHECK(uodm::rank_loss({0.3, 0.7}, {0.3, 0.7}) == 0.0);
  CHECK(uodm::rank_loss({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(uodm::rank_loss({0.5}, {0.0}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(uodm::rank_loss({0.5}, {0.1, 0.2}), PlanError);
}

TEST_CASE("single-class tables are degenerate") {
  std::vector<uodm::OrrPair> table;
  for (int i = 0; i < 10; ++i) table.push_back({"a" + std::to_string(i), "r", false, 0.0});
  CHECK_THROWS_AS(uodm::train_uodm(table, uodm::TrainConfig{}), PlanError);
}

TEST_CASE("bundled csv matches the built-in table") {
  auto built = uodm::builtin_prior_table();
  auto loaded = uodm::load_prior_table(std::string(TIDYPLAN_DATA_DIR) + "/orr_prior.csv");
  REQUIRE(built.size() == loaded.size());
  for (size_t i = 0; i < built.size(); ++i) {
    CHECK(built[i].object_label == loaded[i].object_label);
    CHECK(built[i].rr_label == loaded[i].rr_label);
    CHECK(built[i].probable == loaded[i].probable);
    CHECK(built[i].score == doctest::Approx(loaded[i].score).epsilon(5e-3));
  }
}

TEST_CASE("training loss decreases on average over five seeds") {
  auto table = uodm::builtin_prior_table();
  const int epochs = 15;
  std::vector<double> mean_filter(epochs, 0.0), mean_rank(epochs, 0.0);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    uodm::TrainConfig cfg;
    cfg.seed = seed;
    cfg.epochs = epochs;
    uodm::TrainReport rep;
    uodm::train_uodm(table, cfg, &rep);
    for (int e = 0; e < epochs; ++e) {
      mean_filter[static_cast<size_t>(e)] += rep.filter_epoch_loss[static_cast<size_t>(e)] / 5;
      mean_rank[static_cast<size_t>(e)] += rep.rank_epoch_loss[static_cast<size_t>(e)] / 5;
    }
  }
  for (int e = 0; e + 1 < epochs; ++e) {
    CHECK(mean_filter[static_cast<size_t>(e + 1)] <= mean_filter[static_cast<size_t>(e)] + 1e-9);
    CHECK(mean_rank[static_cast<size_t>(e + 1)] <= mean_rank[static_cast<size_t>(e)] + 1e-9);
  }
}

TEST_CASE("held-out filter accuracy and rank correlation clear the bar") {
  uodm::TrainConfig cfg;  // fixed default split seed
  uodm::TrainReport rep;
  auto models = uodm::train_uodm(uodm::builtin_prior_table(), cfg, &rep);
  CHECK(rep.holdout_accuracy >= 0.9);
  CHECK(rep.holdout_spearman >= 0.7);

  // filter output is a proper distribution for arbitrary inputs
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    nn::Vec x(static_cast<size_t>(cfg.embed_dim));
    for (double& v : x) v = rng.gaussian(0, 1);
    nn::Vec p;
    nn::softmax(models.filter.forward(x), p);
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p[0] >= 0.0);
    CHECK(p[1] >= 0.0);
  }
}

namespace {

uodm::Models trained_models() {
  static uodm::Models m = uodm::train_uodm(uodm::builtin_prior_table(), uodm::TrainConfig{});
  return m;
}

Scenario sample_scenario(int n_po) {
  grid::GenConfig cfg;
  cfg.n_objects = 8;
  cfg.n_partially_occluded = n_po;
  cfg.seed = 77;
  return grid::generate_scenario(cfg);
}

}  // namespace

TEST_CASE("candidate ranking follows score order with id tie-breaks") {
  auto m = trained_models();
  auto s = sample_scenario(3);
  std::vector<int> all;
  for (const auto& r : s.receptacles) all.push_back(r.id);
  auto order = uodm::rank_candidates(m, "apple", all, s);
  REQUIRE(!order.empty());
  for (size_t i = 0; i + 1 < order.size(); ++i) {
    double a = m.pair_score("apple", s.receptacles[static_cast<size_t>(order[i])].label);
    double b = m.pair_score("apple", s.receptacles[static_cast<size_t>(order[i + 1])].label);
    CHECK((a > b || (a == b && order[i] < order[i + 1])));
  }
  // every survivor is filter-probable (the filter kept something for apple)
  for (int rid : order)
    CHECK(m.pair_probable("apple", s.receptacles[static_cast<size_t>(rid)].label));
}

TEST_CASE("apple's top prediction is the kitchen fridge") {
  auto m = trained_models();
  auto s = sample_scenario(0);
  std::vector<int> all;
  for (const auto& r : s.receptacles) all.push_back(r.id);
  auto order = uodm::rank_candidates(m, "apple", all, s);
  REQUIRE(!order.empty());
  CHECK(s.receptacles[static_cast<size_t>(order.front())].label == "kitchen|fridge");
}

TEST_CASE("single candidate is forced regardless of scores") {
  auto m = trained_models();
  auto s = sample_scenario(0);
  // pick a receptacle that the filter would reject for an apple
  int bathroom_rid = -1;
  for (const auto& r : s.receptacles)
    if (r.label == "bathroom|basket") bathroom_rid = r.id;
  REQUIRE(bathroom_rid >= 0);
  auto order = uodm::rank_candidates(m, "apple", {bathroom_rid}, s);
  CHECK(order == std::vector<int>{bathroom_rid});
}

TEST_CASE("prediction, pruning and unfindable flow") {
  auto m = trained_models();
  auto s = sample_scenario(3);
  WorldState st(s);
  auto k = percep::initial_knowledge(st);
  percep::update_knowledge(k, percep::sense(st, st.agent, percep::SenseConfig{}), st);
  REQUIRE(k.unseen.size() == 3);
  uodm::predict_locations(m, k, s);
  for (int id : k.unseen) {
    REQUIRE(k.candidates.count(id) == 1);
    REQUIRE(k.predicted.count(id) == 1);
    CHECK(k.predicted.at(id).receptacle == k.candidates.at(id).front());
    // prediction cell is the receptacle centroid
    CHECK(k.predicted.at(id).pos ==
          s.receptacles[static_cast<size_t>(k.predicted.at(id).receptacle)].centroid);
  }

  int target = *k.unseen.begin();
  int other = *std::next(k.unseen.begin());
  auto other_list = k.candidates.at(other);
  auto list = k.candidates.at(target);
  REQUIRE(list.size() >= 2);
  int first = list[0], second = list[1];
  int attempts_before = k.discovery_attempts;
  uodm::prune_candidate(k, target, first, s);
  CHECK(k.discovery_attempts == attempts_before + 1);
  CHECK(k.predicted.at(target).receptacle == second);
  CHECK(k.candidates.at(other) == other_list);  // untouched neighbor list

  // prune to exhaustion flags the object unfindable
  while (!k.candidates.at(target).empty())
    uodm::prune_candidate(k, target, k.candidates.at(target).front(), s);
  CHECK(k.unfindable.count(target) == 1);
  CHECK(k.predicted.count(target) == 0);

  // a pruned receptacle never comes back for that object
  uodm::predict_locations(m, k, s);
  CHECK(k.predicted.count(target) == 0);
}

TEST_CASE("checkpoint round trip preserves behavior") {
  auto m = trained_models();
  std::string path = "/tmp/tidyplan_uodm_ckpt.bin";
  m.save(path);
  auto back = uodm::Models::load(path);
  for (const auto& o : vocab::object_kinds())
    for (const auto& r : vocab::receptacle_kinds()) {
      CHECK(back.pair_score(o.label, r.label) ==
            doctest::Approx(m.pair_score(o.label, r.label)).epsilon(1e-12));
      CHECK(back.pair_probable(o.label, r.label) == m.pair_probable(o.label, r.label));
    }
}

TEST_CASE("positive rescaling of scores keeps candidate orderings") {
  auto base_models = trained_models();
  auto table = uodm::builtin_prior_table();
  // scale every score, then renormalize back into (0, 1]
  double mx = 0;
  for (const auto& p : table) mx = std::max(mx, 0.6 * p.score);
  auto rescaled = table;
  for (auto& p : rescaled) p.score = p.probable ? 0.6 * p.score / mx : 0.0;
  auto rescaled_models = uodm::train_uodm(rescaled, uodm::TrainConfig{});

  auto s = sample_scenario(0);
  std::vector<int> all;
  for (const auto& r : s.receptacles) all.push_back(r.id);
  for (const auto& o : vocab::object_kinds()) {
    auto a = uodm::rank_candidates(base_models, o.label, all, s);
    auto b = uodm::rank_candidates(rescaled_models, o.label, all, s);
    // orderings must agree wherever the true scores are separated
    auto pos = [](const std::vector<int>& v, int x) {
      return std::find(v.begin(), v.end(), x) - v.begin();
    };
    for (int x : a)
      for (int y : a) {
        if (x == y) continue;
        double sx = vocab::prior_score(o.label, s.receptacles[static_cast<size_t>(x)].label);
        double sy = vocab::prior_score(o.label, s.receptacles[static_cast<size_t>(y)].label);
        if (std::abs(sx - sy) < 0.02) continue;
        if (pos(b, x) == static_cast<long>(b.size()) || pos(b, y) == static_cast<long>(b.size()))
          continue;  // filter disagreement on a borderline pair
        CHECK((pos(a, x) < pos(a, y)) == (pos(b, x) < pos(b, y)));
      }
  }
}
