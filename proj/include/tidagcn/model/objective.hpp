#pragma once

// Prediction layer and losses. Each domain scores all of its items from the
// concatenation [h_A | h_B] of the two pooled sequence representations.

#include <cstddef>
#include <span>

#include "tidagcn/graph/sequence.hpp"
#include "tidagcn/model/params.hpp"
#include "tidagcn/numeric/tensor.hpp"

namespace tidagcn {

// [N x d] each -> [N x items of `domain`] logits [h_A | h_B] W^T + b.
Tensor prediction_logits(const Tensor& h_a, const Tensor& h_b, const ModelParameters& params,
                         Domain domain);

// Row-wise softmax of prediction_logits.
Tensor predict(const Tensor& h_a, const Tensor& h_b, const ModelParameters& params, Domain domain);

// Mean of -log probs[r, targets[r]]. Throws IndexError for invalid targets.
Tensor cross_entropy_loss(const Tensor& probs, std::span<const std::size_t> targets);

// L = L_A + L_B.
Tensor joint_loss(const Tensor& loss_a, const Tensor& loss_b);
double joint_loss(double loss_a, double loss_b);

}  // namespace tidagcn
