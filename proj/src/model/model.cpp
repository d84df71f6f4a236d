#include "tidagcn/model/model.hpp"

#include <algorithm>
#include <map>

#include "tidagcn/model/encoder.hpp"
#include "tidagcn/model/objective.hpp"
#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/ops.hpp"
#include "tidagcn/numeric/sparse.hpp"

namespace tidagcn {
namespace {

std::vector<std::size_t> item_list(const InteractionSequence& s, std::size_t drop_last,
                                   std::size_t max_len) {
  const std::size_t n = s.events.size() - std::min(drop_last, s.events.size());
  const std::size_t first = n > max_len ? n - max_len : 0;
  std::vector<std::size_t> out;
  for (std::size_t i = first; i < n; ++i) out.push_back(s.events[i].item);
  return out;
}

// Packed encoder input for one batch.
struct Packing {
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> nodes;     // per row
  std::vector<std::size_t> accounts;  // per row
  PoolGroups groups;

  Packing() { groups.members.row_ptr = {0}; }

  // Appends a sequence; returns the index of its first pooling group.
  std::size_t add(const CdsGraph& graph, Domain d, std::span<const std::size_t> items,
                  std::size_t account, bool prefixes) {
    const std::size_t first_group = groups.target_rows.size();
    const std::size_t base = nodes.size();
    for (std::size_t it : items) {
      nodes.push_back(graph.item_node(d, it));
      accounts.push_back(account);
    }
    offsets.push_back(nodes.size());
    auto& m = groups.members;
    for (std::size_t p = prefixes ? base : nodes.size() - 1; p < nodes.size(); ++p) {
      for (std::size_t r = base; r <= p; ++r) m.col_idx.push_back(r);
      m.row_ptr.push_back(m.col_idx.size());
      groups.target_rows.push_back(p);
    }
    return first_group;
  }

  void finish() {
    groups.members.n_rows = groups.target_rows.size();
    groups.members.n_cols = nodes.size();
  }
};

// Row selector: out[r] = x[pick[r]] or zero when pick[r] is npos.
Tensor select_rows(const Tensor& x, const std::vector<std::size_t>& pick) {
  CsrPattern p;
  p.n_rows = pick.size();
  p.n_cols = x.rows();
  for (std::size_t r : pick) {
    if (r != Dataset::npos) p.col_idx.push_back(r);
    p.row_ptr.push_back(p.col_idx.size());
  }
  return spmm(p, Tensor::full({p.nnz()}, 1.0), x);
}

}  // namespace

std::vector<SequenceExample> training_examples(const Dataset& dataset,
                                               const TrainingConfig& config) {
  std::vector<SequenceExample> out;
  for (std::size_t i : dataset.train_indices()) {
    const auto& s = dataset.sequences[i];
    if (s.events.size() < 2) continue;
    SequenceExample ex;
    ex.sequence = i;
    ex.account = s.account;
    ex.domain = s.domain;
    ex.input = item_list(s, 1, config.max_len);
    if (config.prefix_training) {
      const std::size_t first = s.events.size() - 1 - ex.input.size();
      for (std::size_t p = 0; p < ex.input.size(); ++p) {
        ex.targets.push_back(s.events[first + p + 1].item);
      }
    } else {
      ex.targets.push_back(s.events.back().item);
    }
    const std::size_t j = dataset.find(s.account, other(s.domain));
    if (j != Dataset::npos) {
      ex.context = item_list(dataset.sequences[j], dataset.is_test(j) ? 1 : 0, config.max_len);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

EvaluationExamples evaluation_examples(const Dataset& dataset, const TrainingConfig& config) {
  EvaluationExamples out;
  for (std::size_t i : dataset.test_indices()) {
    const auto& s = dataset.sequences[i];
    if (s.events.size() < 2) {
      ++out.skipped_short[index_of(s.domain)];
      continue;
    }
    SequenceExample ex;
    ex.sequence = i;
    ex.account = s.account;
    ex.domain = s.domain;
    ex.input = item_list(s, 1, config.max_len);
    ex.targets.push_back(s.events.back().item);
    const std::size_t j = dataset.find(s.account, other(s.domain));
    if (j != Dataset::npos) ex.context = item_list(dataset.sequences[j], 0, config.max_len);
    out.examples.push_back(std::move(ex));
  }
  return out;
}

CdsGraph build_training_graph(const Dataset& dataset, const TrainingConfig& config) {
  GraphOptions opt;
  opt.latent_users = config.latent_users;
  opt.bucketizer = config.bucketizer;
  opt.item_item_edges = config.item_item_edges;
  const auto train = dataset.train_sequences();
  return build_graph(dataset.n_accounts(), dataset.n_items(Domain::A), dataset.n_items(Domain::B),
                     train, opt);
}

Recommender::Recommender(CdsGraph graph, ModelParameters params, TrainingConfig config)
    : graph_(std::move(graph)), params_(std::move(params)), config_(std::move(config)) {
  config_.validate();
  if (params_.node_embeddings.rows() != graph_.n_nodes() ||
      params_.interval_embeddings.rows() != graph_.n_buckets() ||
      params_.w_a.rows() != graph_.n_items_a() || params_.w_b.rows() != graph_.n_items_b() ||
      params_.node_embeddings.cols() != config_.dim) {
    throw DimensionError("recommender: parameter shapes do not match the graph and config");
  }
}

Recommender Recommender::create(const Dataset& dataset, const TrainingConfig& config) {
  config.validate();
  CdsGraph graph = build_training_graph(dataset, config);
  const ModelParameters::Sizes sizes{graph.n_nodes(), graph.n_buckets(), graph.n_items_a(),
                                     graph.n_items_b()};
  ModelParameters params = ModelParameters::initialize(sizes, config, config.seed);
  return Recommender(std::move(graph), std::move(params), config);
}

NodeRepresentations Recommender::propagate(bool training, std::uint64_t dropout_seed) const {
  return tidagcn::propagate(graph_, params_,
                            PropagationSettings::from(config_, training, dropout_seed));
}

BatchOutput Recommender::forward(const Tensor& nodes, std::span<const SequenceExample> batch,
                                 bool training) const {
  const bool prefixes = config_.prefix_training && training;
  Packing pack;
  std::vector<std::size_t> own_group(batch.size()), ctx_group(batch.size(), Dataset::npos);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& ex = batch[i];
    if (ex.input.empty()) throw DataError("example without input items");
    const std::size_t expected = prefixes ? ex.input.size() : 1;
    if (ex.targets.size() != expected) {
      throw DimensionError("example has " + std::to_string(ex.targets.size()) +
                           " targets, expected " + std::to_string(expected));
    }
    own_group[i] = pack.add(graph_, ex.domain, ex.input, ex.account, prefixes);
    if (!ex.context.empty()) {
      ctx_group[i] = pack.add(graph_, other(ex.domain), ex.context, ex.account, false);
    }
  }
  pack.finish();

  const Tensor item_rows = gather_rows(nodes, pack.nodes);
  Tensor account_rows;
  if (config_.pooling == PoolingMode::Attention) {
    std::vector<std::size_t> unique = pack.accounts;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    std::vector<std::size_t> slot(pack.accounts.size());
    for (std::size_t r = 0; r < slot.size(); ++r) {
      slot[r] = static_cast<std::size_t>(
          std::lower_bound(unique.begin(), unique.end(), pack.accounts[r]) - unique.begin());
    }
    account_rows = gather_rows(merge_accounts(graph_, nodes, unique), slot);
  }
  const EncodedBatch enc = encode(item_rows, account_rows, pack.offsets, pack.groups, params_,
                                  EncoderSettings::from(config_, config_.prefix_training));

  BatchOutput out;
  for (Domain d : {Domain::A, Domain::B}) {
    const std::size_t di = index_of(d);
    std::vector<std::size_t> own, ctx;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch[i].domain != d) continue;
      for (std::size_t t = 0; t < batch[i].targets.size(); ++t) {
        own.push_back(own_group[i] + t);
        ctx.push_back(ctx_group[i]);
        out.targets[di].push_back(batch[i].targets[t]);
        out.example_of[di].push_back(i);
      }
    }
    if (own.empty()) continue;
    const Tensor h_own = select_rows(enc.pooled, own);
    const Tensor h_ctx = select_rows(enc.pooled, ctx);
    out.logits[di] = d == Domain::A ? prediction_logits(h_own, h_ctx, params_, d)
                                    : prediction_logits(h_ctx, h_own, params_, d);
  }
  return out;
}

BatchOutput Recommender::forward(std::span<const SequenceExample> batch, bool training,
                                 std::uint64_t dropout_seed) const {
  const NodeRepresentations reps = propagate(training, dropout_seed);
  return forward(reps.final(), batch, training);
}

Tensor Recommender::encode_sequences(const Tensor& nodes, Domain domain,
                                     std::span<const std::vector<std::size_t>> items,
                                     std::span<const std::size_t> accounts) const {
  if (items.size() != accounts.size()) {
    throw DimensionError("encode_sequences: one account per sequence required");
  }
  Packing pack;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].empty()) throw DataError("encode_sequences: empty sequence");
    pack.add(graph_, domain, items[i], accounts[i], false);
  }
  pack.finish();
  const Tensor item_rows = gather_rows(nodes, pack.nodes);
  Tensor account_rows;
  if (config_.pooling == PoolingMode::Attention) {
    account_rows = merge_accounts(graph_, nodes, pack.accounts);
  }
  return encode(item_rows, account_rows, pack.offsets, pack.groups, params_,
                EncoderSettings::from(config_, config_.prefix_training))
      .pooled;
}

}  // namespace tidagcn
