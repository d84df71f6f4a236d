#pragma once

// Sequence encoder: account-aware self-attention stacks over packed item
// rows, followed by smoothed target-attention pooling (or max pooling).
//
// Sequences of a batch are packed back to back: sequence s occupies rows
// [offsets[s], offsets[s + 1]). Pooling runs over groups of rows with one
// target row per group; a group is a whole sequence, or every prefix of a
// sequence when training on prefixes.

#include <cstddef>
#include <span>
#include <vector>

#include "tidagcn/model/config.hpp"
#include "tidagcn/model/params.hpp"
#include "tidagcn/numeric/segment_ops.hpp"
#include "tidagcn/numeric/sparse.hpp"
#include "tidagcn/numeric/tensor.hpp"

namespace tidagcn {

struct EncoderSettings {
  PoolingMode pooling = PoolingMode::Attention;
  QueryMode query = QueryMode::AccountItem;
  double beta = 0.5;
  double layer_norm_eps = 1e-5;
  bool causal = false;  // positions attend to themselves and earlier positions only

  static EncoderSettings from(const TrainingConfig& c, bool causal);
};

struct PoolGroups {
  CsrPattern members;                   // group g pools rows members.col_idx[row_begin(g)..row_end(g))
  std::vector<std::size_t> target_rows;  // per group

  // One group per sequence targeting its last row.
  static PoolGroups whole(std::span<const std::size_t> offsets);
  // One group per position p of every sequence: rows [offset, p], target p.
  static PoolGroups prefixes(std::span<const std::size_t> offsets);
};

struct EncodedBatch {
  Tensor z;             // packed per-position outputs (raw rows under max pooling)
  Tensor pooled;        // one row per group
  Tensor pool_weights;  // per member entry; undefined under max pooling
};

// PE(pos, 2i) = sin(pos / 10000^(2i/d)), PE(pos, 2i+1) = cos(pos / 10000^(2i/d)).
double positional_value(std::size_t pos, std::size_t dim, std::size_t d);
// [length x d] table of positional values.
Tensor positional_table(std::size_t length, std::size_t d);
// Adds the positional vector of each row's position within its sequence.
Tensor positional_encode(const Tensor& rows, std::span<const std::size_t> offsets);
inline Tensor positional_encode(const Tensor& items) {
  const std::size_t off[2] = {0, items.rows()};
  return positional_encode(items, off);
}

// Attention ranges over packed sequences (full or causal).
std::vector<RowRange> attention_ranges(std::span<const std::size_t> offsets, bool causal);

// One stack: attention with q_i = (x_i + acc_i) Wq (or acc_i Wq), keys =
// values = x Wk, then LN(G + FFN(G)). account_rows holds each row's account
// embedding.
Tensor self_attention_layer(const Tensor& x, const Tensor& account_rows,
                            std::span<const RowRange> ranges, const EncoderStack& stack,
                            const EncoderSettings& settings);
// Single-sequence convenience: items [L x d], account [d] or [1 x d].
Tensor self_attention_layer(const Tensor& items, const Tensor& account, const EncoderStack& stack,
                            const EncoderSettings& settings);

// f = relu([z_m | z_t] W1 + b) W2 per member, a = smoothed softmax per group,
// pooled[g] = sum a_m z_m.
EncodedBatch target_attention_pool(const Tensor& z, const PoolGroups& groups,
                                   const ModelParameters& params, double beta);
// Single-sequence convenience: pool z [L x d] against its row `target`.
EncodedBatch target_attention_pool(const Tensor& z, std::size_t target,
                                   const ModelParameters& params, double beta);

// Per-dimension maximum over each group.
Tensor max_pool(const Tensor& rows, const PoolGroups& groups);
Tensor max_pool(const Tensor& items);

// Full encoder: positional encoding, n_stacks attention layers, then pooling.
// Under max pooling the encoder stacks are bypassed and raw rows are pooled.
EncodedBatch encode(const Tensor& item_rows, const Tensor& account_rows,
                    std::span<const std::size_t> offsets, const PoolGroups& groups,
                    const ModelParameters& params, const EncoderSettings& settings);

}  // namespace tidagcn
