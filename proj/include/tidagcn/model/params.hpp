#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tidagcn/model/config.hpp"
#include "tidagcn/numeric/tensor.hpp"

namespace tidagcn {

struct EncoderStack {
  Tensor wq, wk;  // d x d_k; keys double as values
  Tensor ffn_w1, ffn_b1, ffn_w2, ffn_b2;
  Tensor ln_gain, ln_bias;
};

// Every trainable table of the recommender.
struct ModelParameters {
  // propagation
  Tensor node_embeddings;      // (p + n*H + q) x d
  Tensor interval_embeddings;  // n_buckets x d
  std::vector<Tensor> w1, w2;  // d x d each; one shared pair or one per layer

  // sequence encoder
  std::vector<EncoderStack> stacks;
  Tensor pool_w1;  // 2d x hidden, applied to [z_i | z_t]
  Tensor pool_b;   // hidden
  Tensor pool_w2;  // hidden x 1

  // prediction
  Tensor w_a, b_a;  // p x 2d, p
  Tensor w_b, b_b;  // q x 2d, q

  struct Sizes {
    std::size_t n_nodes, n_buckets, n_items_a, n_items_b;
  };

  // Xavier-uniform matrices and embeddings, zero biases, unit layer-norm gains.
  static ModelParameters initialize(const Sizes& sizes, const TrainingConfig& config,
                                    std::uint64_t seed);

  // Stable (name, tensor) listing used by the optimizer and serialization.
  std::vector<std::pair<std::string, Tensor*>> named();
  std::vector<Tensor> all();

  const Tensor& w1_for(std::size_t layer) const { return w1.size() == 1 ? w1[0] : w1[layer]; }
  const Tensor& w2_for(std::size_t layer) const { return w2.size() == 1 ? w2[0] : w2[layer]; }
};

}  // namespace tidagcn
