#include "tidyplan/stategraph.hpp"

#include <algorithm>
#include <cmath>

#include "tidyplan/embedding.hpp"
#include "tidyplan/nav.hpp"

namespace tidyplan {
namespace graph {

namespace {

int edge_cost(const GridMap& map, Cell a, Cell b) {
  int d = nav::distance(map, a, b);
  return d >= 0 ? d : map.width * map.height;  // sentinel keeps the edge set fixed
}

}  // namespace

DirectedStateGraph build_graph(const std::vector<ObjectNodeInput>& objects, Cell agent,
                               const GridMap& map) {
  DirectedStateGraph g;
  g.map_w = map.width;
  g.map_h = map.height;
  g.nodes.push_back({NodeKind::agent, -1, agent, ""});
  for (const auto& o : objects) {
    g.nodes.push_back({NodeKind::source, o.id, o.source_pos, o.label});
    g.nodes.push_back({NodeKind::goal, o.id, o.goal_pos, o.label});
  }
  const int n = static_cast<int>(objects.size());
  for (int k = 0; k < n; ++k)
    g.edges.push_back({0, g.source_index(k), edge_cost(map, agent, objects[static_cast<size_t>(k)].source_pos)});
  for (int k = 0; k < n; ++k)
    g.edges.push_back({g.source_index(k), g.goal_index(k),
                       edge_cost(map, objects[static_cast<size_t>(k)].source_pos,
                                 objects[static_cast<size_t>(k)].goal_pos)});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      g.edges.push_back({g.goal_index(i), g.source_index(j),
                         edge_cost(map, objects[static_cast<size_t>(i)].goal_pos,
                                   objects[static_cast<size_t>(j)].source_pos)});
    }

  const double norm = static_cast<double>(g.map_w + g.map_h);
  std::vector<double> cost_sum(g.nodes.size(), 0.0);
  std::vector<int> cost_cnt(g.nodes.size(), 0);
  for (const auto& e : g.edges) {
    cost_sum[static_cast<size_t>(e.from)] += e.cost;
    cost_sum[static_cast<size_t>(e.to)] += e.cost;
    ++cost_cnt[static_cast<size_t>(e.from)];
    ++cost_cnt[static_cast<size_t>(e.to)];
  }
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& node = g.nodes[i];
    nn::Vec f;
    f.reserve(kNodeFeatDim);
    f.push_back(static_cast<double>(node.pos.x) / g.map_w);
    f.push_back(static_cast<double>(node.pos.y) / g.map_h);
    for (int k = 0; k < 3; ++k) f.push_back(static_cast<int>(node.kind) == k ? 1.0 : 0.0);
    nn::Vec lf = node.label.empty() ? nn::Vec(kLabelFeatDim, 0.0)
                                    : embed::embed_label(node.label, kLabelFeatDim);
    f.insert(f.end(), lf.begin(), lf.end());
    f.push_back(cost_cnt[i] > 0 ? cost_sum[i] / cost_cnt[i] / norm : 0.0);
    g.features.push_back(std::move(f));
  }
  return g;
}

std::vector<ObjectNodeInput> inputs_from_knowledge(const percep::Knowledge& k, const Scenario& s) {
  std::vector<ObjectNodeInput> out;
  for (const auto& o : s.objects) {
    ObjectNodeInput in;
    in.id = o.id;
    auto lbl = k.observed_labels.find(o.id);
    in.label = lbl != k.observed_labels.end() ? lbl->second : o.label;
    if (k.visible.count(o.id)) {
      in.source_pos = k.visible.at(o.id);
    } else if (k.predicted.count(o.id)) {
      in.source_pos = k.predicted.at(o.id).pos;
    } else {
      continue;  // unfindable or not yet predicted
    }
    auto rg = k.resolved_goals.find(o.id);
    in.goal_pos = rg != k.resolved_goals.end() ? rg->second : o.goal_pos;
    out.push_back(std::move(in));
  }
  return out;
}

GcnWeights::GcnWeights(int in_dim, int hidden, int depth, Rng& rng) {
  int d = in_dim;
  for (int l = 0; l < depth; ++l) {
    GcnLayer layer;
    layer.w_self = nn::Mat(hidden, d);
    layer.w_nbr = nn::Mat(hidden, d);
    layer.w_edge.assign(static_cast<size_t>(hidden), 0.0);
    layer.b.assign(static_cast<size_t>(hidden), 0.0);
    double scale = std::sqrt(2.0 / d);
    for (double& v : layer.w_self.a) v = rng.gaussian(0.0, scale);
    for (double& v : layer.w_nbr.a) v = rng.gaussian(0.0, scale);
    for (double& v : layer.w_edge) v = rng.gaussian(0.0, 0.5);
    layers.push_back(std::move(layer));
    d = hidden;
  }
}

GcnWeights GcnWeights::zeros_like() const {
  GcnWeights g;
  for (const auto& l : layers) {
    GcnLayer z;
    z.w_self = nn::Mat(l.w_self.rows, l.w_self.cols);
    z.w_nbr = nn::Mat(l.w_nbr.rows, l.w_nbr.cols);
    z.w_edge.assign(l.w_edge.size(), 0.0);
    z.b.assign(l.b.size(), 0.0);
    g.layers.push_back(std::move(z));
  }
  return g;
}

std::vector<nn::Vec> gcn_forward(const DirectedStateGraph& g, const GcnWeights& w, GcnCache* cache) {
  if (w.layers.empty()) throw PlanError(Err::shape_mismatch, "gcn has no layers");
  if (static_cast<int>(g.features.front().size()) != w.layers.front().w_self.cols)
    throw PlanError(Err::shape_mismatch, "gcn input feature dim mismatch");

  const size_t n = g.nodes.size();
  std::vector<std::vector<int>> in_edges(n);
  for (size_t e = 0; e < g.edges.size(); ++e)
    in_edges[static_cast<size_t>(g.edges[e].to)].push_back(static_cast<int>(e));

  const double cnorm = static_cast<double>(g.map_w + g.map_h);
  std::vector<nn::Vec> h = g.features;
  if (cache) {
    cache->h.clear();
    cache->z.clear();
    cache->in_edges = in_edges;
  }
  for (const auto& layer : w.layers) {
    if (cache) cache->h.push_back(h);
    std::vector<nn::Vec> next(n);
    std::vector<nn::Vec> pre(n);
    for (size_t v = 0; v < n; ++v) {
      nn::Vec z;
      nn::affine(layer.w_self, layer.b, h[v], z);
      const auto& ine = in_edges[v];
      if (!ine.empty()) {
        nn::Vec agg(z.size(), 0.0);
        nn::Vec tmp;
        nn::Vec zero_b(z.size(), 0.0);
        for (int ei : ine) {
          const auto& e = g.edges[static_cast<size_t>(ei)];
          nn::affine(layer.w_nbr, zero_b, h[static_cast<size_t>(e.from)], tmp);
          double c = static_cast<double>(e.cost) / cnorm;
          for (size_t i = 0; i < agg.size(); ++i) agg[i] += tmp[i] + layer.w_edge[i] * c;
        }
        for (size_t i = 0; i < z.size(); ++i) z[i] += agg[i] / static_cast<double>(ine.size());
      }
      pre[v] = z;
      for (double& x : z) x = nn::relu(x);
      next[v] = std::move(z);
    }
    if (cache) cache->z.push_back(pre);
    h = std::move(next);
  }
  return h;
}

void gcn_backward(const DirectedStateGraph& g, const GcnWeights& w, const GcnCache& cache,
                  const std::vector<nn::Vec>& dout, GcnWeights& grads) {
  if (cache.h.size() != w.layers.size())
    throw PlanError(Err::missing_cache, "gcn_backward: cache does not match forward pass");
  const size_t n = g.nodes.size();
  const double cnorm = static_cast<double>(g.map_w + g.map_h);
  std::vector<nn::Vec> dh = dout;

  for (size_t li = w.layers.size(); li-- > 0;) {
    const auto& layer = w.layers[li];
    auto& glayer = grads.layers[li];
    const auto& h = cache.h[li];
    const auto& z = cache.z[li];
    std::vector<nn::Vec> dprev(n, nn::Vec(h[0].size(), 0.0));
    for (size_t v = 0; v < n; ++v) {
      nn::Vec d = dh[v];
      for (size_t i = 0; i < d.size(); ++i) d[i] *= nn::relu_grad(z[v][i]);
      nn::Vec dx;
      nn::affine_backward(layer.w_self, h[v], d, glayer.w_self, glayer.b, dx);
      for (size_t i = 0; i < dx.size(); ++i) dprev[v][i] += dx[i];
      const auto& ine = cache.in_edges[v];
      if (ine.empty()) continue;
      double inv = 1.0 / static_cast<double>(ine.size());
      nn::Vec dscaled(d.size());
      for (size_t i = 0; i < d.size(); ++i) dscaled[i] = d[i] * inv;
      for (int ei : ine) {
        const auto& e = g.edges[static_cast<size_t>(ei)];
        double c = static_cast<double>(e.cost) / cnorm;
        nn::Vec db_dummy(d.size(), 0.0);
        nn::Vec dxn;
        nn::affine_backward(layer.w_nbr, h[static_cast<size_t>(e.from)], dscaled, glayer.w_nbr,
                            db_dummy, dxn);
        for (size_t i = 0; i < dxn.size(); ++i) dprev[static_cast<size_t>(e.from)][i] += dxn[i];
        for (size_t i = 0; i < d.size(); ++i) glayer.w_edge[i] += dscaled[i] * c;
      }
    }
    dh = std::move(dprev);
  }
}

std::vector<double*> param_view(GcnWeights& w) {
  std::vector<double*> out;
  for (auto& l : w.layers) {
    for (auto& v : l.w_self.a) out.push_back(&v);
    for (auto& v : l.w_nbr.a) out.push_back(&v);
    for (auto& v : l.w_edge) out.push_back(&v);
    for (auto& v : l.b) out.push_back(&v);
  }
  return out;
}

std::vector<const double*> param_view(const GcnWeights& w) {
  std::vector<const double*> out;
  for (const auto& l : w.layers) {
    for (const auto& v : l.w_self.a) out.push_back(&v);
    for (const auto& v : l.w_nbr.a) out.push_back(&v);
    for (const auto& v : l.w_edge) out.push_back(&v);
    for (const auto& v : l.b) out.push_back(&v);
  }
  return out;
}

void gcn_to_checkpoint(const GcnWeights& w, ckpt::Checkpoint& c, const std::string& prefix) {
  c.put(prefix + ".layers", {1}, {static_cast<double>(w.layers.size())});
  for (size_t l = 0; l < w.layers.size(); ++l) {
    const auto& layer = w.layers[l];
    std::string base = prefix + ".l" + std::to_string(l);
    c.put(base + ".w_self", {static_cast<uint32_t>(layer.w_self.rows), static_cast<uint32_t>(layer.w_self.cols)},
          layer.w_self.a);
    c.put(base + ".w_nbr", {static_cast<uint32_t>(layer.w_nbr.rows), static_cast<uint32_t>(layer.w_nbr.cols)},
          layer.w_nbr.a);
    c.put(base + ".w_edge", {static_cast<uint32_t>(layer.w_edge.size())}, layer.w_edge);
    c.put(base + ".b", {static_cast<uint32_t>(layer.b.size())}, layer.b);
  }
}

GcnWeights gcn_from_checkpoint(const ckpt::Checkpoint& c, const std::string& prefix) {
  GcnWeights w;
  size_t layers = static_cast<size_t>(c.get(prefix + ".layers").data[0]);
  for (size_t l = 0; l < layers; ++l) {
    std::string base = prefix + ".l" + std::to_string(l);
    GcnLayer layer;
    const auto& ws = c.get(base + ".w_self");
    layer.w_self = nn::Mat(static_cast<int>(ws.dims[0]), static_cast<int>(ws.dims[1]));
    layer.w_self.a = ws.data;
    const auto& wn = c.get(base + ".w_nbr");
    layer.w_nbr = nn::Mat(static_cast<int>(wn.dims[0]), static_cast<int>(wn.dims[1]));
    layer.w_nbr.a = wn.data;
    layer.w_edge = c.get(base + ".w_edge").data;
    layer.b = c.get(base + ".b").data;
    w.layers.push_back(std::move(layer));
  }
  return w;
}

}  // namespace graph
}  // namespace tidyplan
