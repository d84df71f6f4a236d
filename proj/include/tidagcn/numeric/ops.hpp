#pragma once

// Differentiable dense operations. Rank-2 tensors are row-major [rows x cols];
// a rank-1 tensor of length n stands for a bias/gain vector.

#include <cstddef>
#include <cstdint>
#include <span>

#include "tidagcn/numeric/tensor.hpp"

namespace tidagcn {

// [m x k] * [k x n]
Tensor matmul(const Tensor& a, const Tensor& b);
// [m x k] * [n x k]^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
// Elementwise product.
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
// a[r, :] + bias for every row r.
Tensor add_row_bias(const Tensor& a, const Tensor& bias);

Tensor leaky_relu(const Tensor& x, double slope);
Tensor relu(const Tensor& x);

// Row-wise softmax with per-row max subtraction.
Tensor softmax_rows(const Tensor& x);

// Normalizes each row to mean 0 / variance 1 (biased), then gain * . + bias.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

// out[i, :] = x[idx[i], :]
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> idx);
// [a | b] along columns.
Tensor concat_cols(const Tensor& a, const Tensor& b);

// Same values under a new shape of equal size.
Tensor reshape(const Tensor& x, Shape shape);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

// Inverted dropout: each element kept with probability 1 - rate and rescaled.
// The mask depends only on (seed, element index).
Tensor dropout(const Tensor& x, double rate, std::uint64_t seed);

// Mean over rows of -log softmax(logits)[r, targets[r]].
Tensor cross_entropy_logits(const Tensor& logits, std::span<const std::size_t> targets);
// Mean over rows of -log probs[r, targets[r]].
Tensor cross_entropy_probs(const Tensor& probs, std::span<const std::size_t> targets);

}  // namespace tidagcn
