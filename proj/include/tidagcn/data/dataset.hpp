#pragma once

// Two-domain interaction dataset with dense zero-based ids, one time-ordered
// sequence per (account, domain), and an optional train/test split.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tidagcn/graph/sequence.hpp"

namespace tidagcn {

enum class SplitTag : std::uint8_t { Train, Test };

struct Dataset {
  // Raw ids by dense id; dense ids follow ascending raw-id order.
  std::vector<std::uint64_t> account_ids;
  std::vector<std::uint64_t> item_ids[2];  // per domain

  // Ordered by (account, domain); events ordered by timestamp.
  std::vector<InteractionSequence> sequences;

  // Per-sequence tags; empty until split() runs.
  std::vector<SplitTag> split;

  // Sequences whose events arrived out of timestamp order and were sorted.
  std::size_t unsorted_sequences = 0;

  std::size_t n_accounts() const { return account_ids.size(); }
  std::size_t n_items(Domain d) const { return item_ids[index_of(d)].size(); }
  std::size_t n_events() const;

  bool is_split() const { return split.size() == sequences.size() && !sequences.empty(); }
  bool is_test(std::size_t seq) const { return is_split() && split[seq] == SplitTag::Test; }
  std::vector<std::size_t> train_indices() const;  // all sequences when not split
  std::vector<std::size_t> test_indices() const;   // none when not split
  std::vector<InteractionSequence> train_sequences() const;

  // Index of the sequence of (account, domain), or npos.
  std::size_t find(std::size_t account, Domain d) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // Throws DataError when ids are out of range, sequences are empty,
  // unordered, or an (account, domain) pair repeats.
  void validate() const;
};

// Tags round(fraction * n) sequences as train, the rest as test, by a seeded
// shuffle. Throws ConfigError unless 0 < fraction < 1.
Dataset split(const Dataset& dataset, double fraction, std::uint64_t seed);

// Keeps the first round(fraction * n) sequences of a seeded shuffle
// (their split tags, if any, travel with them). Ids are not renumbered.
Dataset subsample(const Dataset& dataset, double fraction, std::uint64_t seed);

// TSV interaction log: account_id TAB domain TAB item_id TAB timestamp, LF
// line endings, '#' comments and blank lines ignored. Errors carry line and
// column.
Dataset parse_tsv(std::istream& in);
Dataset parse_tsv_file(const std::string& path);

// Writes every event grouped by (account, domain) in time order, using raw ids.
void write_tsv(const Dataset& dataset, std::ostream& out);
void write_tsv_file(const Dataset& dataset, const std::string& path);

}  // namespace tidagcn
