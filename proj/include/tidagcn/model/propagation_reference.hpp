#pragma once

// Per-node message passing written directly from the message equations, with
// plain vectors and naive loops. It is the test oracle for the matrix-form
// propagation in propagation.hpp and is not used by training.
//
// Vectors are row vectors and a d x d weight W acts as e * W.

#include <cstddef>
#include <utility>
#include <vector>

#include "tidagcn/graph/cds_graph.hpp"
#include "tidagcn/model/config.hpp"

namespace tidagcn::reference {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major list of rows

struct Neighbor {
  std::size_t node;
  double score;  // s, cosine similarity (or 0 in uniform mode)
  double gamma;  // normalized weight
};

// Weights for one target: self plus every in-neighbor. gamma over all terms
// sums to 1.
struct TargetWeights {
  double self_score = 0.0;
  double self_gamma = 0.0;
  std::vector<Neighbor> neighbors;  // NeighborSets order: items_a, items_b, users, predecessors
};

struct AttentionWeights {
  std::vector<TargetWeights> targets;  // indexed by node id
  std::size_t zero_norm_hits = 0;
};

struct LayerParams {
  Mat embeddings;  // n_nodes x d
  Mat intervals;   // n_buckets x d
  Mat w1, w2;      // d x d
  double alpha = 0.8;
  double leaky_slope = 0.2;
};

double cosine(const Vec& a, const Vec& b);

AttentionWeights attention_scores(const CdsGraph& graph, const Mat& embeddings,
                                  AttentionMode mode = AttentionMode::Cosine);

// Aggregated representation of a latent-user node.
Vec user_messages(const CdsGraph& graph, const LayerParams& params,
                  const AttentionWeights& weights, std::size_t user_node);

// Aggregated representation of an item node (either domain).
Vec item_messages(const CdsGraph& graph, const LayerParams& params,
                  const AttentionWeights& weights, std::size_t item_node);

// One layer for every node, dispatching on node kind.
Mat propagate_layer(const CdsGraph& graph, const LayerParams& params,
                    AttentionMode mode = AttentionMode::Cosine);

// Arithmetic mean of equally-sized vectors.
Vec mean(const std::vector<Vec>& parts);

}  // namespace tidagcn::reference
