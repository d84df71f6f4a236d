#pragma once

// Cross-domain sequential (CDS) graph.
//
// Node layout follows the block order of the propagation matrices:
//   [0, p)                 items of domain A
//   [p, p + n*H)           latent users, account k owns p + k*H .. p + k*H + H - 1
//   [p + n*H, p + n*H + q) items of domain B
//
// Every latent user of an account connects to every item the account touched
// in either domain. Item-item edges are directed prev -> next within a domain
// and carry the interval bucket of their most recent occurrence.

#include <cstddef>
#include <span>
#include <vector>

#include "tidagcn/graph/bucketizer.hpp"
#include "tidagcn/graph/sequence.hpp"
#include "tidagcn/numeric/sparse.hpp"

namespace tidagcn {

struct UserItemEdge {
  std::size_t user;  // node id
  std::size_t item;  // node id

  auto operator<=>(const UserItemEdge&) const = default;
};

struct ItemItemEdge {
  std::size_t prev;  // node id
  std::size_t next;  // node id
  std::size_t bucket;

  auto operator<=>(const ItemItemEdge&) const = default;
};

enum class NodeKind { ItemA, User, ItemB };

// In-neighbors of a node, i.e. the sources of the messages it aggregates.
struct NeighborSets {
  std::vector<std::size_t> items_a;
  std::vector<std::size_t> items_b;
  std::vector<std::size_t> users;
  std::vector<std::size_t> predecessors;
  std::vector<std::size_t> predecessor_buckets;  // parallel to predecessors
};

enum class EntryKind : unsigned char { Self, UserFromItem, ItemFromUser, ItemFromItem };

// Row-per-target sparsity of the propagation operator: for every node the
// self entry first, then its in-neighbors in NeighborSets order.
struct PropagationPattern {
  CsrPattern csr;
  std::vector<EntryKind> kind;       // per entry
  std::vector<std::size_t> bucket;   // per entry; meaningful for ItemFromItem only
};

struct GraphOptions {
  std::size_t latent_users = 2;
  IntervalBucketizer bucketizer{};
  bool item_item_edges = true;  // false drops sequential transitions entirely
};

class CdsGraph {
 public:
  std::size_t n_accounts() const { return n_accounts_; }
  std::size_t n_items_a() const { return n_items_a_; }
  std::size_t n_items_b() const { return n_items_b_; }
  std::size_t latent_users_per_account() const { return h_; }
  std::size_t n_buckets() const { return n_buckets_; }
  std::size_t n_nodes() const { return n_items_a_ + n_accounts_ * h_ + n_items_b_; }

  std::size_t item_node(Domain d, std::size_t item) const;
  std::size_t user_node(std::size_t account, std::size_t h) const;
  NodeKind kind(std::size_t node) const;
  // Account of a latent-user node.
  std::size_t account_of(std::size_t user_node) const;

  const std::vector<UserItemEdge>& user_item_edges(Domain d) const {
    return user_item_[index_of(d)];
  }
  const std::vector<ItemItemEdge>& item_item_edges(Domain d) const {
    return item_item_[index_of(d)];
  }

  // Throws IndexError for an invalid node id.
  const NeighborSets& neighbor_sets(std::size_t node) const;

  const PropagationPattern& pattern() const { return pattern_; }

  friend CdsGraph build_graph(std::size_t n_accounts, std::size_t n_items_a,
                              std::size_t n_items_b,
                              std::span<const InteractionSequence> sequences,
                              const GraphOptions& options);

 private:
  std::size_t n_accounts_ = 0, n_items_a_ = 0, n_items_b_ = 0, h_ = 1, n_buckets_ = 1;
  std::vector<UserItemEdge> user_item_[2];
  std::vector<ItemItemEdge> item_item_[2];
  std::vector<NeighborSets> neighbors_;
  PropagationPattern pattern_;
};

// Throws DataError (with sequence/event context) for out-of-range ids and
// ConfigError for h == 0 or an invalid bucketizer.
CdsGraph build_graph(std::size_t n_accounts, std::size_t n_items_a, std::size_t n_items_b,
                     std::span<const InteractionSequence> sequences, const GraphOptions& options);

inline const NeighborSets& neighbor_sets(const CdsGraph& graph, std::size_t node) {
  return graph.neighbor_sets(node);
}

}  // namespace tidagcn
