#include "tidagcn/model/encoder.hpp"

#include <cmath>

#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/ops.hpp"

namespace tidagcn {

EncoderSettings EncoderSettings::from(const TrainingConfig& c, bool causal) {
  EncoderSettings s;
  s.pooling = c.pooling;
  s.query = c.query;
  s.beta = c.beta;
  s.layer_norm_eps = c.layer_norm_eps;
  s.causal = causal;
  return s;
}

PoolGroups PoolGroups::whole(std::span<const std::size_t> offsets) {
  PoolGroups g;
  g.members.n_rows = offsets.size() - 1;
  g.members.n_cols = offsets.back();
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    if (offsets[s] >= offsets[s + 1]) throw DimensionError("PoolGroups: empty sequence");
    for (std::size_t r = offsets[s]; r < offsets[s + 1]; ++r) g.members.col_idx.push_back(r);
    g.members.row_ptr.push_back(g.members.col_idx.size());
    g.target_rows.push_back(offsets[s + 1] - 1);
  }
  return g;
}

PoolGroups PoolGroups::prefixes(std::span<const std::size_t> offsets) {
  PoolGroups g;
  g.members.n_rows = offsets.back();
  g.members.n_cols = offsets.back();
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    for (std::size_t p = offsets[s]; p < offsets[s + 1]; ++p) {
      for (std::size_t r = offsets[s]; r <= p; ++r) g.members.col_idx.push_back(r);
      g.members.row_ptr.push_back(g.members.col_idx.size());
      g.target_rows.push_back(p);
    }
  }
  return g;
}

double positional_value(std::size_t pos, std::size_t dim, std::size_t d) {
  const double pair = static_cast<double>(dim - dim % 2);
  const double angle = static_cast<double>(pos) / std::pow(10000.0, pair / static_cast<double>(d));
  return dim % 2 == 0 ? std::sin(angle) : std::cos(angle);
}

Tensor positional_table(std::size_t length, std::size_t d) {
  std::vector<double> v(length * d);
  for (std::size_t p = 0; p < length; ++p) {
    for (std::size_t i = 0; i < d; ++i) v[p * d + i] = positional_value(p, i, d);
  }
  return Tensor::from({length, d}, std::move(v));
}

Tensor positional_encode(const Tensor& rows, std::span<const std::size_t> offsets) {
  if (rows.rank() != 2 || offsets.empty() || offsets.back() != rows.rows()) {
    throw DimensionError("positional_encode: offsets do not cover " + shape_string(rows.shape()));
  }
  const std::size_t d = rows.cols();
  std::vector<double> pe(rows.size());
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    for (std::size_t r = offsets[s]; r < offsets[s + 1]; ++r) {
      for (std::size_t i = 0; i < d; ++i) pe[r * d + i] = positional_value(r - offsets[s], i, d);
    }
  }
  return add(rows, Tensor::from(rows.shape(), std::move(pe)));
}

std::vector<RowRange> attention_ranges(std::span<const std::size_t> offsets, bool causal) {
  std::vector<RowRange> ranges;
  ranges.reserve(offsets.back());
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    for (std::size_t r = offsets[s]; r < offsets[s + 1]; ++r) {
      ranges.push_back({offsets[s], causal ? r + 1 : offsets[s + 1]});
    }
  }
  return ranges;
}

Tensor self_attention_layer(const Tensor& x, const Tensor& account_rows,
                            std::span<const RowRange> ranges, const EncoderStack& stack,
                            const EncoderSettings& settings) {
  const Tensor query_in =
      settings.query == QueryMode::AccountItem ? add(x, account_rows) : account_rows;
  const Tensor q = matmul(query_in, stack.wq);
  const Tensor kv = matmul(x, stack.wk);
  const double scale = 1.0 / std::sqrt(static_cast<double>(stack.wk.cols()));
  const Tensor g = range_attention(q, kv, kv, ranges, scale);
  const Tensor hidden = relu(add_row_bias(matmul(g, stack.ffn_w1), stack.ffn_b1));
  const Tensor ffn = add_row_bias(matmul(hidden, stack.ffn_w2), stack.ffn_b2);
  return layer_norm(add(g, ffn), stack.ln_gain, stack.ln_bias, settings.layer_norm_eps);
}

Tensor self_attention_layer(const Tensor& items, const Tensor& account, const EncoderStack& stack,
                            const EncoderSettings& settings) {
  const std::size_t L = items.rows();
  if (L == 0) throw DimensionError("self_attention_layer: empty sequence");
  if (account.size() != items.cols()) {
    throw DimensionError("self_attention_layer: account " + shape_string(account.shape()) +
                         " vs items " + shape_string(items.shape()));
  }
  const std::vector<std::size_t> zeros(L, 0);
  const Tensor acc_rows = gather_rows(reshape(account, {1, items.cols()}), zeros);
  const std::size_t off[2] = {0, L};
  const auto ranges = attention_ranges(off, settings.causal);
  return self_attention_layer(items, acc_rows, ranges, stack, settings);
}

EncodedBatch target_attention_pool(const Tensor& z, const PoolGroups& groups,
                                   const ModelParameters& params, double beta) {
  const CsrPattern& m = groups.members;
  if (groups.target_rows.size() != m.n_rows) {
    throw DimensionError("target_attention_pool: one target row per group required");
  }
  std::vector<std::size_t> target_of_member(m.nnz());
  for (std::size_t g = 0; g < m.n_rows; ++g) {
    if (m.row_begin(g) == m.row_end(g)) throw DimensionError("target_attention_pool: empty group");
    for (std::size_t e = m.row_begin(g); e < m.row_end(g); ++e) {
      target_of_member[e] = groups.target_rows[g];
    }
  }
  const Tensor pair = concat_cols(gather_rows(z, m.col_idx), gather_rows(z, target_of_member));
  const Tensor hidden = relu(add_row_bias(matmul(pair, params.pool_w1), params.pool_b));
  const Tensor f = reshape(matmul(hidden, params.pool_w2), {m.nnz()});
  EncodedBatch out;
  out.z = z;
  out.pool_weights = segment_smoothed_softmax(f, m.row_ptr, beta);
  out.pooled = spmm(m, out.pool_weights, z);
  return out;
}

EncodedBatch target_attention_pool(const Tensor& z, std::size_t target,
                                   const ModelParameters& params, double beta) {
  if (target >= z.rows()) throw IndexError("target_attention_pool: target row out of range");
  const std::size_t off[2] = {0, z.rows()};
  PoolGroups g = PoolGroups::whole(off);
  g.target_rows[0] = target;
  return target_attention_pool(z, g, params, beta);
}

Tensor max_pool(const Tensor& rows, const PoolGroups& groups) {
  return segment_max(rows, groups.members);
}

Tensor max_pool(const Tensor& items) {
  const std::size_t off[2] = {0, items.rows()};
  return max_pool(items, PoolGroups::whole(off));
}

EncodedBatch encode(const Tensor& item_rows, const Tensor& account_rows,
                    std::span<const std::size_t> offsets, const PoolGroups& groups,
                    const ModelParameters& params, const EncoderSettings& settings) {
  if (settings.pooling == PoolingMode::Max) {
    EncodedBatch out;
    out.z = item_rows;
    out.pooled = max_pool(item_rows, groups);
    return out;
  }
  const auto ranges = attention_ranges(offsets, settings.causal);
  Tensor x = positional_encode(item_rows, offsets);
  for (const EncoderStack& stack : params.stacks) {
    x = self_attention_layer(x, account_rows, ranges, stack, settings);
  }
  return target_attention_pool(x, groups, params, settings.beta);
}

}  // namespace tidagcn
