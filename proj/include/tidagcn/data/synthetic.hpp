#pragma once

// Seeded generator of shared-account two-domain logs.
//
// Each account is shared by several ground-truth users. A user has a primary
// topic per domain; the domain-B topic copies the domain-A topic with
// probability `correlation`, otherwise it is drawn independently. Events
// alternate between the account's users in sessions; within a session a user
// either follows the successor chain of their previous item or draws a fresh
// item from their topic (popularity-skewed). The gap after an event is drawn
// from the interval distribution of the consumed item's type.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tidagcn/data/dataset.hpp"
#include "tidagcn/data/keyvalue.hpp"

namespace tidagcn {

struct SyntheticSpec {
  std::size_t n_accounts = 200;
  std::size_t users_min = 2, users_max = 4;  // ground-truth users per account
  std::size_t n_items_a = 500, n_items_b = 500;
  std::size_t n_sequences = 0;  // 0 means 2 * n_accounts; range [n_accounts, 2 * n_accounts]
  std::size_t seq_len_min = 8, seq_len_max = 20;
  std::size_t n_topics = 8;
  double topic_focus = 0.85;     // probability an event uses the user's primary topic
  double correlation = 0.6;      // cross-domain primary-topic coupling
  double chain_prob = 0.5;       // probability of following the successor chain
  double session_switch = 0.2;   // probability the acting user changes between events
  double popularity_skew = 0.8;  // Zipf exponent of item popularity within a topic
  // Item types: type(item) = topic(item) % n_item_types. Type k has mean gap
  // base_gap * gap_ratio^(k / (n_item_types - 1)), log-normal with gap_sigma.
  std::size_t n_item_types = 2;
  double base_gap = 600.0;
  double gap_ratio = 10.0;
  double gap_sigma = 0.25;
  std::uint64_t seed = 1;

  std::size_t sequences() const { return n_sequences == 0 ? 2 * n_accounts : n_sequences; }
  std::size_t topic_of(Domain d, std::size_t item) const;
  std::size_t type_of(Domain d, std::size_t item) const;
  double mean_gap(std::size_t type) const;

  // Throws ConfigError for invalid counts or probabilities.
  void validate() const;
  // Reads every field by name; unknown keys are errors.
  static SyntheticSpec from(const KeyValues& kv);
};

struct SyntheticTruth {
  std::vector<std::size_t> first_user;      // per account: id of its first user
  std::vector<std::size_t> user_account;    // per user
  std::vector<std::size_t> user_topic[2];   // per user, per domain
  // Parallel to dataset.sequences[s].events.
  std::vector<std::vector<std::size_t>> event_user;
  std::vector<std::vector<std::size_t>> event_topic;
  std::vector<std::vector<bool>> event_chained;
};

struct SyntheticData {
  Dataset dataset;  // unsplit; raw ids equal dense ids and cover every item
  SyntheticTruth truth;
};

SyntheticData generate(const SyntheticSpec& spec);

}  // namespace tidagcn
