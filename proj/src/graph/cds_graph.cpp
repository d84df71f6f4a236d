#include "tidagcn/graph/cds_graph.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>

#include "tidagcn/numeric/errors.hpp"

namespace tidagcn {

std::size_t CdsGraph::item_node(Domain d, std::size_t item) const {
  if (d == Domain::A) {
    if (item >= n_items_a_) throw IndexError("item A" + std::to_string(item) + " out of range");
    return item;
  }
  if (item >= n_items_b_) throw IndexError("item B" + std::to_string(item) + " out of range");
  return n_items_a_ + n_accounts_ * h_ + item;
}

std::size_t CdsGraph::user_node(std::size_t account, std::size_t h) const {
  if (account >= n_accounts_ || h >= h_) {
    throw IndexError("latent user (" + std::to_string(account) + ", " + std::to_string(h) +
                     ") out of range");
  }
  return n_items_a_ + account * h_ + h;
}

NodeKind CdsGraph::kind(std::size_t node) const {
  if (node >= n_nodes()) throw IndexError("node " + std::to_string(node) + " out of range");
  if (node < n_items_a_) return NodeKind::ItemA;
  if (node < n_items_a_ + n_accounts_ * h_) return NodeKind::User;
  return NodeKind::ItemB;
}

std::size_t CdsGraph::account_of(std::size_t user_node) const {
  if (kind(user_node) != NodeKind::User) {
    throw IndexError("node " + std::to_string(user_node) + " is not a latent user");
  }
  return (user_node - n_items_a_) / h_;
}

const NeighborSets& CdsGraph::neighbor_sets(std::size_t node) const {
  if (node >= n_nodes()) throw IndexError("node " + std::to_string(node) + " out of range");
  return neighbors_[node];
}

CdsGraph build_graph(std::size_t n_accounts, std::size_t n_items_a, std::size_t n_items_b,
                     std::span<const InteractionSequence> sequences, const GraphOptions& options) {
  if (options.latent_users == 0) throw ConfigError("latent users per account must be >= 1");
  options.bucketizer.validate();

  CdsGraph g;
  g.n_accounts_ = n_accounts;
  g.n_items_a_ = n_items_a;
  g.n_items_b_ = n_items_b;
  g.h_ = options.latent_users;
  g.n_buckets_ = options.bucketizer.n_buckets;

  // (prev, next) -> (timestamp of the later event, bucket); the max of the
  // pair is kept so the result does not depend on sequence order.
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::int64_t, std::size_t>> transitions[2];
  std::vector<UserItemEdge> touched[2];

  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const auto& seq = sequences[s];
    const std::size_t d = index_of(seq.domain);
    const std::size_t limit = seq.domain == Domain::A ? n_items_a : n_items_b;
    auto context = [&](std::size_t e) {
      return "sequence " + std::to_string(s) + " (account " + std::to_string(seq.account) +
             ", domain " + domain_letter(seq.domain) + "), event " + std::to_string(e);
    };
    if (seq.account >= n_accounts) {
      throw DataError(context(0) + ": account " + std::to_string(seq.account) + " >= " +
                      std::to_string(n_accounts));
    }
    for (std::size_t e = 0; e < seq.events.size(); ++e) {
      const auto& ev = seq.events[e];
      if (ev.item >= limit) {
        throw DataError(context(e) + ": item " + std::to_string(ev.item) + " >= " +
                        std::to_string(limit));
      }
      const std::size_t item = g.item_node(seq.domain, ev.item);
      for (std::size_t h = 0; h < g.h_; ++h) touched[d].push_back({g.user_node(seq.account, h), item});
      // Repeats of the same item produce no self-loop; self-connections are
      // part of propagation.
      if (e > 0 && options.item_item_edges && seq.events[e - 1].item != ev.item) {
        const auto& pv = seq.events[e - 1];
        const std::int64_t gap = ev.timestamp >= pv.timestamp ? ev.timestamp - pv.timestamp
                                                              : pv.timestamp - ev.timestamp;
        const std::size_t bucket = options.bucketizer.bucket(gap);
        const auto key = std::make_pair(g.item_node(seq.domain, pv.item), item);
        const auto val = std::make_pair(ev.timestamp, bucket);
        auto [it, inserted] = transitions[d].emplace(key, val);
        if (!inserted && it->second < val) it->second = val;
      }
    }
  }

  for (std::size_t d = 0; d < 2; ++d) {
    auto& ui = touched[d];
    std::sort(ui.begin(), ui.end());
    ui.erase(std::unique(ui.begin(), ui.end()), ui.end());
    g.user_item_[d] = std::move(ui);
    for (const auto& [key, val] : transitions[d]) {
      g.item_item_[d].push_back({key.first, key.second, val.second});
    }
  }

  g.neighbors_.assign(g.n_nodes(), {});
  for (std::size_t d = 0; d < 2; ++d) {
    for (const auto& e : g.user_item_[d]) {
      auto& un = g.neighbors_[e.user];
      (d == 0 ? un.items_a : un.items_b).push_back(e.item);
      g.neighbors_[e.item].users.push_back(e.user);
    }
    for (const auto& e : g.item_item_[d]) {
      auto& nn = g.neighbors_[e.next];
      nn.predecessors.push_back(e.prev);
      nn.predecessor_buckets.push_back(e.bucket);
    }
  }
  for (auto& nb : g.neighbors_) std::sort(nb.users.begin(), nb.users.end());
  // predecessors were appended in (prev, next) order, hence already sorted by prev.

  auto& pat = g.pattern_;
  pat.csr.n_rows = pat.csr.n_cols = g.n_nodes();
  pat.csr.row_ptr.assign(1, 0);
  for (std::size_t v = 0; v < g.n_nodes(); ++v) {
    const auto& nb = g.neighbors_[v];
    auto push = [&](std::size_t col, EntryKind k, std::size_t bucket) {
      pat.csr.col_idx.push_back(col);
      pat.kind.push_back(k);
      pat.bucket.push_back(bucket);
    };
    push(v, EntryKind::Self, 0);
    for (auto c : nb.items_a) push(c, EntryKind::UserFromItem, 0);
    for (auto c : nb.items_b) push(c, EntryKind::UserFromItem, 0);
    for (auto c : nb.users) push(c, EntryKind::ItemFromUser, 0);
    for (std::size_t i = 0; i < nb.predecessors.size(); ++i) {
      push(nb.predecessors[i], EntryKind::ItemFromItem, nb.predecessor_buckets[i]);
    }
    pat.csr.row_ptr.push_back(pat.csr.col_idx.size());
  }
  return g;
}

}  // namespace tidagcn
