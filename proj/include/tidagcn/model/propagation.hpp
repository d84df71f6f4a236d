#pragma once

// Layer-wise graph propagation over the CDS graph.
//
// For every layer, with Gamma the attention weights on the propagation
// pattern (self entry included) recomputed from the previous layer:
//
//   E' = LeakyReLU( (Gamma_a E + (1 - alpha) Gamma_ii T) W1 + ((Gamma_n E) (.) E) W2 )
//
//   Gamma_a   self + user/item neighbor weights, predecessor weights scaled by alpha
//   Gamma_ii  predecessor weights routed to interval-bucket rows of T
//   Gamma_n   all non-self weights
//
// Row r of the result equals the per-node message aggregation of node r;
// propagation_reference.hpp computes the same thing node by node.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tidagcn/graph/cds_graph.hpp"
#include "tidagcn/model/config.hpp"
#include "tidagcn/model/params.hpp"
#include "tidagcn/numeric/tensor.hpp"

namespace tidagcn {

struct PropagationSettings {
  double alpha = 0.8;
  double leaky_slope = 0.2;
  std::size_t n_layers = 1;
  AttentionMode attention = AttentionMode::Cosine;
  bool strict_cosine = false;
  double dropout = 0.0;  // applied to pre-activations when > 0
  std::uint64_t dropout_seed = 0;

  static PropagationSettings from(const TrainingConfig& c, bool training, std::uint64_t seed);
};

struct NodeRepresentations {
  std::vector<Tensor> layers;  // layers[0] is the raw embedding table
  std::vector<Tensor> attention;  // per layer, weights on graph.pattern() entries
  std::size_t zero_norm_hits = 0;

  const Tensor& final() const { return layers.back(); }
};

// Attention weights on every entry of graph.pattern(); each target row
// (self + in-neighbors) sums to 1. Throws NumericError for zero-norm rows
// when strict is set.
Tensor attention_weights(const CdsGraph& graph, const Tensor& embeddings, AttentionMode mode,
                         bool strict = false, std::size_t* zero_norm_hits = nullptr);

// One propagation layer from `embeddings`.
Tensor propagate_layer(const CdsGraph& graph, const Tensor& embeddings, const Tensor& intervals,
                       const Tensor& w1, const Tensor& w2, const PropagationSettings& settings,
                       std::size_t layer, NodeRepresentations* trace = nullptr);

NodeRepresentations propagate(const CdsGraph& graph, const ModelParameters& params,
                              const PropagationSettings& settings);

// Mean of the H latent-user rows of each listed account: [accounts x d].
Tensor merge_accounts(const CdsGraph& graph, const Tensor& node_rows,
                      std::span<const std::size_t> accounts);

// Elementwise mean of equally-shaped tensors (latent-user or per-latent-user
// item representations).
Tensor average(std::span<const Tensor> parts);

inline Tensor merge_account(std::span<const Tensor> latent) { return average(latent); }
inline Tensor account_level_item(std::span<const Tensor> per_latent) { return average(per_latent); }

}  // namespace tidagcn
