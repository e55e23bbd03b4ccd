#include "tidyplan/uodm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tidyplan/embedding.hpp"
#include "tidyplan/vocab.hpp"

namespace tidyplan {
namespace uodm {

std::vector<OrrPair> builtin_prior_table() {
  std::vector<OrrPair> out;
  for (const auto& o : vocab::object_kinds()) {
    for (const auto& r : vocab::receptacle_kinds()) {
      double s = vocab::prior_score(o.label, r.label);
      out.push_back({o.label, r.label, s > 0.0, s});
    }
  }
  return out;
}

std::vector<OrrPair> load_prior_table(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw PlanError(Err::io_error, "cannot read " + csv_path);
  std::vector<OrrPair> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::stringstream ss(line);
    OrrPair p;
    std::string cls, score;
    if (!std::getline(ss, p.object_label, ',') || !std::getline(ss, p.rr_label, ',') ||
        !std::getline(ss, cls, ',') || !std::getline(ss, score, ','))
      throw PlanError(Err::io_error, "bad prior table row: " + line);
    p.probable = cls == "probable";
    p.score = std::stod(score);
    out.push_back(std::move(p));
  }
  return out;
}

void save_prior_table(const std::vector<OrrPair>& table, const std::string& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw PlanError(Err::io_error, "cannot write " + csv_path);
  out << "object_label,room_receptacle_label,class,score\n";
  char buf[32];
  for (const auto& p : table) {
    std::snprintf(buf, sizeof(buf), "%.2f", p.score);
    out << p.object_label << "," << p.rr_label << "," << (p.probable ? "probable" : "implausible")
        << "," << buf << "\n";
  }
}

double filter_loss(const std::vector<nn::Vec>& probs, const std::vector<int>& labels) {
  if (probs.size() != labels.size() || probs.empty())
    throw PlanError(Err::length_mismatch, "filter_loss: batch mismatch");
  double total = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    double p = probs[i][static_cast<size_t>(labels[i])];
    total += -std::log(std::max(p, 1e-12));
  }
  return total / static_cast<double>(probs.size());
}

double rank_loss(const nn::Vec& predicted, const nn::Vec& truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw PlanError(Err::length_mismatch, "rank_loss: length mismatch");
  double total = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    double d = predicted[i] - truth[i];
    total += d * d;
  }
  return total / static_cast<double>(predicted.size());
}

double spearman(const nn::Vec& a, const nn::Vec& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw PlanError(Err::length_mismatch, "spearman: need matching lists");
  auto ranks = [](const nn::Vec& v) {
    std::vector<size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t x, size_t y) { return v[x] < v[y]; });
    nn::Vec r(v.size(), 0.0);
    size_t i = 0;
    while (i < idx.size()) {
      size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  nn::Vec ra = ranks(a), rb = ranks(b);
  double ma = 0, mb = 0;
  for (size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(ra.size());
  mb /= static_cast<double>(rb.size());
  double cov = 0, va = 0, vb = 0;
  for (size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0 || vb == 0) return 0.0;
  return cov / std::sqrt(va * vb);
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

bool Models::pair_probable(const std::string& object_label, const std::string& rr_label) const {
  auto e = embed::embed_orr(object_label, rr_label, embed_dim);
  auto logits = filter.forward(e);
  nn::Vec p;
  nn::softmax(logits, p);
  return p[0] >= p[1];  // class 0 = probable
}

double Models::pair_score(const std::string& object_label, const std::string& rr_label) const {
  auto e = embed::embed_orr(object_label, rr_label, embed_dim);
  return sigmoid(ranker.forward(e)[0]);
}

void Models::to_checkpoint(ckpt::Checkpoint& c, const std::string& prefix) const {
  c.put(prefix + ".embed_dim", {1}, {static_cast<double>(embed_dim)});
  auto dump = [&](const nn::Mlp& m, const std::string& name) {
    c.put(name + ".layers", {1}, {static_cast<double>(m.w.size())});
    for (size_t l = 0; l < m.w.size(); ++l) {
      c.put(name + ".w" + std::to_string(l),
            {static_cast<uint32_t>(m.w[l].rows), static_cast<uint32_t>(m.w[l].cols)}, m.w[l].a);
      c.put(name + ".b" + std::to_string(l), {static_cast<uint32_t>(m.b[l].size())}, m.b[l]);
    }
  };
  dump(filter, prefix + ".filter");
  dump(ranker, prefix + ".ranker");
}

Models Models::from_checkpoint(const ckpt::Checkpoint& c, const std::string& prefix) {
  Models m;
  m.embed_dim = static_cast<int>(c.get(prefix + ".embed_dim").data[0]);
  auto read = [&](nn::Mlp& mlp, const std::string& name) {
    size_t layers = static_cast<size_t>(c.get(name + ".layers").data[0]);
    mlp.w.clear();
    mlp.b.clear();
    for (size_t l = 0; l < layers; ++l) {
      const auto& ws = c.get(name + ".w" + std::to_string(l));
      nn::Mat w(static_cast<int>(ws.dims[0]), static_cast<int>(ws.dims[1]));
      w.a = ws.data;
      mlp.w.push_back(std::move(w));
      mlp.b.push_back(c.get(name + ".b" + std::to_string(l)).data);
    }
  };
  read(m.filter, prefix + ".filter");
  read(m.ranker, prefix + ".ranker");
  return m;
}

void Models::save(const std::string& path) const {
  ckpt::Checkpoint c;
  to_checkpoint(c, "uodm");
  c.save(path);
}

Models Models::load(const std::string& path) {
  return from_checkpoint(ckpt::Checkpoint::load(path), "uodm");
}

Models train_uodm(const std::vector<OrrPair>& table, const TrainConfig& cfg, TrainReport* report) {
  size_t n_probable = 0;
  for (const auto& p : table)
    if (p.probable) ++n_probable;
  if (n_probable == 0 || n_probable == table.size())
    throw PlanError(Err::degenerate_table, "prior table needs both classes");

  Rng rng(cfg.seed);
  std::vector<size_t> order(table.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  size_t holdout = static_cast<size_t>(static_cast<double>(table.size()) * cfg.holdout_fraction);
  std::vector<size_t> test_idx(order.begin(), order.begin() + static_cast<long>(holdout));
  std::vector<size_t> train_idx(order.begin() + static_cast<long>(holdout), order.end());

  std::vector<nn::Vec> emb(table.size());
  for (size_t i = 0; i < table.size(); ++i)
    emb[i] = embed::embed_orr(table[i].object_label, table[i].rr_label, cfg.embed_dim);

  Models m;
  m.embed_dim = cfg.embed_dim;
  m.filter = nn::Mlp({cfg.embed_dim, cfg.hidden, cfg.hidden, 2}, rng);
  m.ranker = nn::Mlp({cfg.embed_dim, cfg.hidden, cfg.hidden, 1}, rng);

  nn::Adam opt_f, opt_r;
  opt_f.lr = cfg.lr;
  opt_r.lr = cfg.lr;
  auto params_f = nn::param_view(m.filter);
  auto params_r = nn::param_view(m.ranker);
  opt_f.init(params_f.size());
  opt_r.init(params_r.size());

  std::vector<size_t> rank_train;
  for (size_t i : train_idx)
    if (table[i].probable) rank_train.push_back(i);

  // the probable class is the small one; oversample it so the filter cannot
  // settle for the majority answer
  std::vector<size_t> filter_train = train_idx;
  for (size_t i : train_idx)
    if (table[i].probable) {
      filter_train.push_back(i);
      filter_train.push_back(i);
    }

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(filter_train);
    double epoch_loss = 0;
    size_t batches = 0;
    for (size_t start = 0; start < filter_train.size(); start += static_cast<size_t>(cfg.batch)) {
      size_t end = std::min(filter_train.size(), start + static_cast<size_t>(cfg.batch));
      nn::Mlp grads = m.filter.zeros_like();
      double loss = 0;
      for (size_t bi = start; bi < end; ++bi) {
        size_t i = filter_train[bi];
        nn::Mlp::Cache cache;
        auto logits = m.filter.forward(emb[i], &cache);
        nn::Vec p;
        nn::softmax(logits, p);
        int y = table[i].probable ? 0 : 1;
        loss += -std::log(std::max(p[static_cast<size_t>(y)], 1e-12));
        nn::Vec dlogits(2);
        double inv = 1.0 / static_cast<double>(end - start);
        dlogits[0] = (p[0] - (y == 0 ? 1.0 : 0.0)) * inv;
        dlogits[1] = (p[1] - (y == 1 ? 1.0 : 0.0)) * inv;
        m.filter.backward(cache, dlogits, grads);
      }
      std::vector<double> g;
      for (const double* v : nn::param_view(const_cast<const nn::Mlp&>(grads))) g.push_back(*v);
      opt_f.step(params_f, g);
      epoch_loss += loss / static_cast<double>(end - start);
      ++batches;
    }
    if (report) report->filter_epoch_loss.push_back(epoch_loss / static_cast<double>(batches));

    rng.shuffle(rank_train);
    double rank_epoch = 0;
    size_t rank_batches = 0;
    for (size_t start = 0; start < rank_train.size(); start += static_cast<size_t>(cfg.batch)) {
      size_t end = std::min(rank_train.size(), start + static_cast<size_t>(cfg.batch));
      nn::Mlp grads = m.ranker.zeros_like();
      double loss = 0;
      for (size_t bi = start; bi < end; ++bi) {
        size_t i = rank_train[bi];
        nn::Mlp::Cache cache;
        double z = m.ranker.forward(emb[i], &cache)[0];
        double pred = sigmoid(z);
        double diff = pred - table[i].score;
        loss += diff * diff;
        double inv = 1.0 / static_cast<double>(end - start);
        nn::Vec dz{2.0 * diff * pred * (1.0 - pred) * inv};
        m.ranker.backward(cache, dz, grads);
      }
      std::vector<double> g;
      for (const double* v : nn::param_view(const_cast<const nn::Mlp&>(grads))) g.push_back(*v);
      opt_r.step(params_r, g);
      rank_epoch += loss / static_cast<double>(end - start);
      ++rank_batches;
    }
    if (report && rank_batches > 0)
      report->rank_epoch_loss.push_back(rank_epoch / static_cast<double>(rank_batches));
  }

  if (report) {
    size_t correct = 0;
    nn::Vec pred_scores, true_scores;
    for (size_t i : test_idx) {
      bool want = table[i].probable;
      if (m.pair_probable(table[i].object_label, table[i].rr_label) == want) ++correct;
      if (want) {
        pred_scores.push_back(m.pair_score(table[i].object_label, table[i].rr_label));
        true_scores.push_back(table[i].score);
      }
    }
    report->holdout_accuracy =
        test_idx.empty() ? 1.0 : static_cast<double>(correct) / static_cast<double>(test_idx.size());
    report->holdout_spearman = pred_scores.size() >= 2 ? spearman(pred_scores, true_scores) : 0.0;
  }
  return m;
}

std::vector<int> rank_candidates(const Models& m, const std::string& object_label,
                                 const std::vector<int>& candidate_ids, const Scenario& s) {
  if (candidate_ids.empty())
    throw PlanError(Err::degenerate_input, "rank_candidates: empty candidate list");
  struct Scored {
    int id;
    double score;
    bool probable;
  };
  std::vector<Scored> scored;
  for (int rid : candidate_ids) {
    const auto& label = s.receptacles[static_cast<size_t>(rid)].label;
    scored.push_back({rid, m.pair_score(object_label, label), m.pair_probable(object_label, label)});
  }
  bool any_probable = std::any_of(scored.begin(), scored.end(), [](const Scored& x) { return x.probable; });
  std::vector<Scored> pool;
  for (const auto& x : scored)
    if (!any_probable || x.probable) pool.push_back(x);
  std::sort(pool.begin(), pool.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  std::vector<int> out;
  for (const auto& x : pool) out.push_back(x.id);
  return out;
}

void predict_locations(const Models& m, percep::Knowledge& k, const Scenario& s) {
  for (int id : k.unseen) {
    if (k.unfindable.count(id)) continue;
    const auto& o = s.objects[static_cast<size_t>(id)];
    auto it = k.candidates.find(id);
    if (it == k.candidates.end()) {
      std::vector<int> all;
      for (const auto& r : s.receptacles)
        if (!k.inspected.count(r.id)) all.push_back(r.id);
      auto ranked = rank_candidates(m, o.label, all, s);
      it = k.candidates.emplace(id, std::move(ranked)).first;
    }
    if (it->second.empty()) {
      k.unfindable.insert(id);
      k.predicted.erase(id);
      continue;
    }
    int rid = it->second.front();
    k.predicted[id] = {rid, s.receptacles[static_cast<size_t>(rid)].centroid};
  }
}

void prune_candidate(percep::Knowledge& k, int object_id, int receptacle_id, const Scenario& s) {
  auto it = k.candidates.find(object_id);
  if (it == k.candidates.end())
    throw PlanError(Err::degenerate_input, "prune_candidate: no candidate list");
  auto& list = it->second;
  auto pos = std::find(list.begin(), list.end(), receptacle_id);
  if (pos == list.end())
    throw PlanError(Err::degenerate_input, "prune_candidate: receptacle not in list");
  list.erase(pos);
  ++k.discovery_attempts;
  if (list.empty()) {
    k.unfindable.insert(object_id);
    k.predicted.erase(object_id);
  } else {
    int rid = list.front();
    k.predicted[object_id] = {rid, s.receptacles[static_cast<size_t>(rid)].centroid};
  }
}

}  // namespace uodm
}  // namespace tidyplan
