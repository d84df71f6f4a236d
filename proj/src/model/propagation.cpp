#include "tidagcn/model/propagation.hpp"

#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/ops.hpp"
#include "tidagcn/numeric/segment_ops.hpp"
#include "tidagcn/numeric/sparse.hpp"

namespace tidagcn {

PropagationSettings PropagationSettings::from(const TrainingConfig& c, bool training,
                                              std::uint64_t seed) {
  PropagationSettings s;
  s.alpha = c.alpha;
  s.leaky_slope = c.leaky_slope;
  s.n_layers = c.n_layers;
  s.attention = c.attention;
  s.strict_cosine = c.strict_cosine;
  s.dropout = training ? c.dropout : 0.0;
  s.dropout_seed = seed;
  return s;
}

Tensor attention_weights(const CdsGraph& graph, const Tensor& embeddings, AttentionMode mode,
                         bool strict, std::size_t* zero_norm_hits) {
  const auto& csr = graph.pattern().csr;
  if (embeddings.rank() != 2 || embeddings.rows() != graph.n_nodes()) {
    throw DimensionError("attention_weights: embeddings " + shape_string(embeddings.shape()) +
                         " for " + std::to_string(graph.n_nodes()) + " nodes");
  }
  if (mode == AttentionMode::Uniform) {
    std::vector<double> w(csr.nnz());
    for (std::size_t r = 0; r < csr.n_rows; ++r) {
      const double v = 1.0 / static_cast<double>(csr.row_end(r) - csr.row_begin(r));
      for (std::size_t e = csr.row_begin(r); e < csr.row_end(r); ++e) w[e] = v;
    }
    return Tensor::from({csr.nnz()}, std::move(w));
  }
  std::size_t hits = 0;
  Tensor scores = edge_cosine(embeddings, csr, &hits);
  if (zero_norm_hits) *zero_norm_hits += hits;
  if (strict && hits > 0) {
    throw NumericError("attention: " + std::to_string(hits) +
                       " attention entries touch a zero-norm embedding (strict cosine)");
  }
  return segment_softmax(scores, csr.row_ptr);
}

Tensor propagate_layer(const CdsGraph& graph, const Tensor& embeddings, const Tensor& intervals,
                       const Tensor& w1, const Tensor& w2, const PropagationSettings& settings,
                       std::size_t layer, NodeRepresentations* trace) {
  const PropagationPattern& pat = graph.pattern();
  const std::size_t nnz = pat.csr.nnz();
  std::size_t hits = 0;
  Tensor gamma = attention_weights(graph, embeddings, settings.attention, settings.strict_cosine,
                                   &hits);

  // Entry masks: the aggregate keeps the self entry and scales transitions by
  // alpha; the interaction term uses neighbors only.
  std::vector<double> agg_scale(nnz), neighbor_mask(nnz);
  std::vector<std::size_t> transition_entries;
  for (std::size_t e = 0; e < nnz; ++e) {
    const EntryKind k = pat.kind[e];
    agg_scale[e] = k == EntryKind::ItemFromItem ? settings.alpha : 1.0;
    neighbor_mask[e] = k == EntryKind::Self ? 0.0 : 1.0;
    if (k == EntryKind::ItemFromItem) transition_entries.push_back(e);
  }
  Tensor aggregate =
      spmm(pat.csr, mul(gamma, Tensor::from({nnz}, std::move(agg_scale))), embeddings);

  // The interval term vanishes identically at alpha = 1 and is skipped so the
  // output does not depend on the interval table at all.
  if (settings.alpha < 1.0 && !transition_entries.empty()) {
    CsrPattern interval_csr;
    interval_csr.n_rows = pat.csr.n_rows;
    interval_csr.n_cols = intervals.rows();
    interval_csr.row_ptr.assign(pat.csr.n_rows + 1, 0);
    for (std::size_t r = 0; r < pat.csr.n_rows; ++r) {
      std::size_t count = 0;
      for (std::size_t e = pat.csr.row_begin(r); e < pat.csr.row_end(r); ++e) {
        if (pat.kind[e] == EntryKind::ItemFromItem) {
          interval_csr.col_idx.push_back(pat.bucket[e]);
          ++count;
        }
      }
      interval_csr.row_ptr[r + 1] = interval_csr.row_ptr[r] + count;
    }
    Tensor gamma_col = reshape(gamma, {nnz, 1});
    Tensor transition_gamma =
        reshape(gather_rows(gamma_col, transition_entries), {transition_entries.size()});
    aggregate = add(aggregate,
                    scale(spmm(interval_csr, transition_gamma, intervals), 1.0 - settings.alpha));
  }

  Tensor neighborhood =
      spmm(pat.csr, mul(gamma, Tensor::from({nnz}, std::move(neighbor_mask))), embeddings);
  Tensor pre = add(matmul(aggregate, w1), matmul(mul(neighborhood, embeddings), w2));
  if (settings.dropout > 0.0) {
    pre = dropout(pre, settings.dropout, settings.dropout_seed + 0x9E37ULL * (layer + 1));
  }
  if (trace) {
    trace->attention.push_back(gamma);
    trace->zero_norm_hits += hits;
  }
  return leaky_relu(pre, settings.leaky_slope);
}

NodeRepresentations propagate(const CdsGraph& graph, const ModelParameters& params,
                              const PropagationSettings& settings) {
  NodeRepresentations out;
  out.layers.push_back(params.node_embeddings);
  for (std::size_t l = 0; l < settings.n_layers; ++l) {
    out.layers.push_back(propagate_layer(graph, out.layers.back(), params.interval_embeddings,
                                         params.w1_for(l), params.w2_for(l), settings, l, &out));
  }
  return out;
}

Tensor merge_accounts(const CdsGraph& graph, const Tensor& node_rows,
                      std::span<const std::size_t> accounts) {
  const std::size_t h = graph.latent_users_per_account();
  CsrPattern p;
  p.n_rows = accounts.size();
  p.n_cols = node_rows.rows();
  p.row_ptr.reserve(accounts.size() + 1);
  for (std::size_t a : accounts) {
    if (a >= graph.n_accounts()) {
      throw IndexError("merge_accounts: account " + std::to_string(a) + " out of range");
    }
    for (std::size_t k = 0; k < h; ++k) p.col_idx.push_back(graph.user_node(a, k));
    p.row_ptr.push_back(p.col_idx.size());
  }
  Tensor w = Tensor::full({p.nnz()}, 1.0 / static_cast<double>(h));
  return spmm(p, w, node_rows);
}

Tensor average(std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("average: no tensors");
  Tensor acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = add(acc, parts[i]);
  if (parts.size() == 1) return acc;
  return scale(acc, 1.0 / static_cast<double>(parts.size()));
}

}  // namespace tidagcn
