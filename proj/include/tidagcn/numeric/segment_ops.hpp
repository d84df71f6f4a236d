#pragma once

// Differentiable operations over variable-length groups of rows: graph
// attention scores, per-neighborhood softmax, packed-sequence attention and
// pooling.

#include <cstddef>
#include <span>
#include <vector>

#include "tidagcn/numeric/sparse.hpp"
#include "tidagcn/numeric/tensor.hpp"

namespace tidagcn {

inline constexpr double kNormFloor = 1e-12;

// Cosine similarity with both norms floored at kNormFloor.
double cosine(std::span<const double> a, std::span<const double> b);

// s[e] = cosine(x[row(e)], x[col(e)]) for every pattern entry. Diagonal
// entries are the constant 1 (0 for a zero row) and carry no gradient.
// zero_norm_hits, when given, is incremented for every entry touching a
// zero-norm row.
Tensor edge_cosine(const Tensor& x, const CsrPattern& pattern,
                   std::size_t* zero_norm_hits = nullptr);

// Softmax over each segment [offsets[g], offsets[g + 1]) of a vector.
Tensor segment_softmax(const Tensor& scores, std::span<const std::size_t> offsets);

// a[i] = exp(f[i]) / (sum_{j in segment} exp(f[j]))^beta, computed in the log
// domain. beta = 1 is a plain softmax; beta = 0 leaves exp(f).
Tensor segment_smoothed_softmax(const Tensor& scores, std::span<const std::size_t> offsets,
                                double beta);

// Half-open row range a query may attend to.
struct RowRange {
  std::size_t begin;
  std::size_t end;
};

// Scaled dot-product attention over packed rows. Row i of the output is
// sum_{j in ranges[i]} softmax_j(q_i . k_j * scale) v_j.
Tensor range_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                       std::span<const RowRange> ranges, double scale);

// out[g, :] = elementwise max over rows pattern.col_idx[row_begin(g) .. row_end(g)).
// Ties resolve to the first row; gradient flows to the argmax only.
Tensor segment_max(const Tensor& x, const CsrPattern& groups);

}  // namespace tidagcn
