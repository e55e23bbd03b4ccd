#pragma once

#include <string>
#include <vector>

#include "tidyplan/checkpoint.hpp"
#include "tidyplan/core.hpp"
#include "tidyplan/gridmap.hpp"
#include "tidyplan/nn.hpp"
#include "tidyplan/perception.hpp"

namespace tidyplan {
namespace graph {

enum class NodeKind : uint8_t { agent = 0, source = 1, goal = 2 };

constexpr int kLabelFeatDim = 16;
// x, y, kind one-hot, label hash, mean incident edge cost
constexpr int kNodeFeatDim = 2 + 3 + kLabelFeatDim + 1;

struct DsgNode {
  NodeKind kind = NodeKind::agent;
  int object_id = -1;
  Cell pos;
  std::string label;
};

struct DsgEdge {
  int from = 0;
  int to = 0;
  int cost = 0;  // BFS cells; unreachable pairs carry width*height
};

// Agent node first, then (source, goal) per object in input order. Edges:
// agent->every source, source->own goal, each goal->every other source.
struct DirectedStateGraph {
  std::vector<DsgNode> nodes;
  std::vector<DsgEdge> edges;
  std::vector<nn::Vec> features;  // per node, kNodeFeatDim
  int map_w = 0;
  int map_h = 0;

  int object_count() const { return static_cast<int>(nodes.size()) / 2; }
  int source_index(int k) const { return 1 + 2 * k; }
  int goal_index(int k) const { return 2 + 2 * k; }
};

struct ObjectNodeInput {
  int id = -1;
  std::string label;
  Cell source_pos;
  Cell goal_pos;
};

DirectedStateGraph build_graph(const std::vector<ObjectNodeInput>& objects, Cell agent,
                               const GridMap& map);

// Node inputs for every known object: observed positions for visible ones,
// predicted receptacle centroids for unseen ones, resolved goals when a
// collision override is active. Unfindable objects drop out.
std::vector<ObjectNodeInput> inputs_from_knowledge(const percep::Knowledge& k, const Scenario& s);

struct GcnLayer {
  nn::Mat w_self;
  nn::Mat w_nbr;
  nn::Vec w_edge;
  nn::Vec b;
};

struct GcnWeights {
  std::vector<GcnLayer> layers;

  GcnWeights() = default;
  GcnWeights(int in_dim, int hidden, int depth, Rng& rng);

  int out_dim() const { return layers.empty() ? 0 : layers.back().w_self.rows; }
  GcnWeights zeros_like() const;
};

struct GcnCache {
  std::vector<std::vector<nn::Vec>> h;  // per layer, input activations per node
  std::vector<std::vector<nn::Vec>> z;  // per layer, pre-activations per node
  std::vector<std::vector<int>> in_edges;  // per node, edge indices
};

// Per node: rectifier(self transform + mean over in-neighbors of neighbor
// transform + edge-cost channel); no-in-neighbor nodes use the self path.
std::vector<nn::Vec> gcn_forward(const DirectedStateGraph& g, const GcnWeights& w,
                                 GcnCache* cache = nullptr);

// Exact reverse-mode gradients; requires the forward cache.
void gcn_backward(const DirectedStateGraph& g, const GcnWeights& w, const GcnCache& cache,
                  const std::vector<nn::Vec>& dout, GcnWeights& grads);

std::vector<double*> param_view(GcnWeights& w);
std::vector<const double*> param_view(const GcnWeights& w);

void gcn_to_checkpoint(const GcnWeights& w, ckpt::Checkpoint& c, const std::string& prefix);
GcnWeights gcn_from_checkpoint(const ckpt::Checkpoint& c, const std::string& prefix);

}  // namespace graph
}  // namespace tidyplan
