#include "tidagcn/model/propagation_reference.hpp"

#include <algorithm>
#include <cmath>

#include "tidagcn/numeric/errors.hpp"

namespace tidagcn::reference {
namespace {

constexpr double kFloor = 1e-12;

double norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// x * W for a row vector x.
Vec times(const Vec& x, const Mat& w) {
  Vec out(w.empty() ? 0 : w[0].size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += x[i] * w[i][j];
  }
  return out;
}

Vec hadamard(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

void add_scaled(Vec& acc, double c, const Vec& x) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * x[i];
}

Vec leaky(const Vec& x, double slope) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] >= 0.0 ? x[i] : slope * x[i];
  return out;
}

// Message from a neighbor u into target v: W1 e_u + W2 (e_u (.) e_v).
Vec neighbor_message(const Vec& eu, const Vec& ev, const LayerParams& p) {
  Vec m = times(eu, p.w1);
  add_scaled(m, 1.0, times(hadamard(eu, ev), p.w2));
  return m;
}

}  // namespace

double cosine(const Vec& a, const Vec& b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot / (std::max(norm(a), kFloor) * std::max(norm(b), kFloor));
}

AttentionWeights attention_scores(const CdsGraph& graph, const Mat& embeddings,
                                  AttentionMode mode) {
  AttentionWeights out;
  out.targets.resize(graph.n_nodes());
  for (std::size_t v = 0; v < graph.n_nodes(); ++v) {
    const NeighborSets& ns = graph.neighbor_sets(v);
    std::vector<std::size_t> sources;
    for (const auto* list : {&ns.items_a, &ns.items_b, &ns.users, &ns.predecessors}) {
      sources.insert(sources.end(), list->begin(), list->end());
    }
    TargetWeights& tw = out.targets[v];
    const bool cos = mode == AttentionMode::Cosine;
    const bool v_zero = norm(embeddings[v]) == 0.0;
    tw.self_score = cos ? (v_zero ? 0.0 : cosine(embeddings[v], embeddings[v])) : 0.0;
    if (cos && v_zero) ++out.zero_norm_hits;
    for (std::size_t u : sources) {
      double s = 0.0;
      if (cos) {
        s = cosine(embeddings[v], embeddings[u]);
        if (v_zero || norm(embeddings[u]) == 0.0) ++out.zero_norm_hits;
      }
      tw.neighbors.push_back({u, s, 0.0});
    }
    // Plain enumeration of exp(s) / sum exp(s); scores are cosines in [-1, 1].
    double z = std::exp(tw.self_score);
    for (const auto& n : tw.neighbors) z += std::exp(n.score);
    tw.self_gamma = std::exp(tw.self_score) / z;
    for (auto& n : tw.neighbors) n.gamma = std::exp(n.score) / z;
  }
  return out;
}

Vec user_messages(const CdsGraph& graph, const LayerParams& params,
                  const AttentionWeights& weights, std::size_t user_node) {
  if (graph.kind(user_node) != NodeKind::User) {
    throw IndexError("user_messages: node " + std::to_string(user_node) + " is not a latent user");
  }
  const Vec& eu = params.embeddings[user_node];
  const TargetWeights& tw = weights.targets[user_node];
  Vec sum(eu.size(), 0.0);
  add_scaled(sum, tw.self_gamma, times(eu, params.w1));
  for (const Neighbor& n : tw.neighbors) {
    add_scaled(sum, n.gamma, neighbor_message(params.embeddings[n.node], eu, params));
  }
  return leaky(sum, params.leaky_slope);
}

Vec item_messages(const CdsGraph& graph, const LayerParams& params,
                  const AttentionWeights& weights, std::size_t item_node) {
  if (graph.kind(item_node) == NodeKind::User) {
    throw IndexError("item_messages: node " + std::to_string(item_node) + " is not an item");
  }
  const Vec& ei = params.embeddings[item_node];
  const NeighborSets& ns = graph.neighbor_sets(item_node);
  const TargetWeights& tw = weights.targets[item_node];
  Vec sum(ei.size(), 0.0);
  add_scaled(sum, tw.self_gamma, times(ei, params.w1));
  for (const Neighbor& n : tw.neighbors) {
    const Vec& eu = params.embeddings[n.node];
    const auto it = std::find(ns.predecessors.begin(), ns.predecessors.end(), n.node);
    if (it == ns.predecessors.end()) {
      add_scaled(sum, n.gamma, neighbor_message(eu, ei, params));
      continue;
    }
    const std::size_t bucket = ns.predecessor_buckets[it - ns.predecessors.begin()];
    Vec content(ei.size(), 0.0);
    add_scaled(content, params.alpha, eu);
    add_scaled(content, 1.0 - params.alpha, params.intervals[bucket]);
    Vec m = times(content, params.w1);
    add_scaled(m, 1.0, times(hadamard(eu, ei), params.w2));
    add_scaled(sum, n.gamma, m);
  }
  return leaky(sum, params.leaky_slope);
}

Mat propagate_layer(const CdsGraph& graph, const LayerParams& params, AttentionMode mode) {
  const AttentionWeights w = attention_scores(graph, params.embeddings, mode);
  Mat out(graph.n_nodes());
  for (std::size_t v = 0; v < graph.n_nodes(); ++v) {
    out[v] = graph.kind(v) == NodeKind::User ? user_messages(graph, params, w, v)
                                             : item_messages(graph, params, w, v);
  }
  return out;
}

Vec mean(const std::vector<Vec>& parts) {
  if (parts.empty()) throw DimensionError("mean: no vectors");
  Vec out(parts[0].size(), 0.0);
  for (const Vec& p : parts) add_scaled(out, 1.0, p);
  for (double& x : out) x /= static_cast<double>(parts.size());
  return out;
}

}  // namespace tidagcn::reference
