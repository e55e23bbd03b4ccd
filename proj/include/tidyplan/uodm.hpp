#pragma once

#include <map>
#include <string>
#include <vector>

#include "tidyplan/checkpoint.hpp"
#include "tidyplan/core.hpp"
#include "tidyplan/gridmap.hpp"
#include "tidyplan/nn.hpp"
#include "tidyplan/perception.hpp"

namespace tidyplan {
namespace uodm {

struct OrrPair {
  std::string object_label;
  std::string rr_label;
  bool probable = false;
  double score = 0.0;  // 0 for implausible pairs
};

std::vector<OrrPair> load_prior_table(const std::string& csv_path);
void save_prior_table(const std::vector<OrrPair>& table, const std::string& csv_path);
// The in-code synthetic table over the simulator vocabulary.
std::vector<OrrPair> builtin_prior_table();

// Mean cross-entropy of 2-way predictions against one-hot labels; true-class
// probabilities clamp at 1e-12 before the log.
double filter_loss(const std::vector<nn::Vec>& probs, const std::vector<int>& labels);

// Mean squared error between predicted and reference scores.
double rank_loss(const nn::Vec& predicted, const nn::Vec& truth);

struct TrainConfig {
  int embed_dim = 64;
  int hidden = 64;
  int epochs = 220;
  double lr = 1e-3;
  int batch = 32;
  double holdout_fraction = 0.2;
  uint64_t seed = 17;
};

struct Models {
  int embed_dim = 64;
  nn::Mlp filter;  // 2-way probable/implausible head
  nn::Mlp ranker;  // scalar score head, sigmoid-squashed

  bool pair_probable(const std::string& object_label, const std::string& rr_label) const;
  double pair_score(const std::string& object_label, const std::string& rr_label) const;

  void to_checkpoint(ckpt::Checkpoint& c, const std::string& prefix) const;
  static Models from_checkpoint(const ckpt::Checkpoint& c, const std::string& prefix);
  void save(const std::string& path) const;
  static Models load(const std::string& path);
};

struct TrainReport {
  double holdout_accuracy = 0.0;   // filter, held-out pairs
  double holdout_spearman = 0.0;   // ranker vs true scores, held-out probable pairs
  std::vector<double> filter_epoch_loss;
  std::vector<double> rank_epoch_loss;
};

// Trains the filter on every pair and the ranker on probable pairs only.
Models train_uodm(const std::vector<OrrPair>& table, const TrainConfig& cfg, TrainReport* report = nullptr);

// Spearman rank correlation with tie-averaged ranks.
double spearman(const nn::Vec& a, const nn::Vec& b);

// Filter+rank over candidate receptacles: implausible candidates drop (all
// dropping falls back to rank order over everything), survivors sort by
// score descending with receptacle-id tie-breaks.
std::vector<int> rank_candidates(const Models& m, const std::string& object_label,
                                 const std::vector<int>& candidate_ids, const Scenario& s);

// Fills per-object candidate lists and predictions for every unseen object
// that lacks them; refreshes predictions to the head of each list.
void predict_locations(const Models& m, percep::Knowledge& k, const Scenario& s);

// Removes a receptacle from one object's candidate list after a fruitless
// search; counts the discovery attempt. An emptied list marks the object
// unfindable.
void prune_candidate(percep::Knowledge& k, int object_id, int receptacle_id, const Scenario& s);

}  // namespace uodm
}  // namespace tidyplan
