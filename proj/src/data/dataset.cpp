#include "tidagcn/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/random.hpp"

namespace tidagcn {

std::size_t Dataset::n_events() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.events.size();
  return n;
}

std::vector<std::size_t> Dataset::train_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (!is_test(i)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Dataset::test_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (is_test(i)) out.push_back(i);
  }
  return out;
}

std::vector<InteractionSequence> Dataset::train_sequences() const {
  std::vector<InteractionSequence> out;
  for (std::size_t i : train_indices()) out.push_back(sequences[i]);
  return out;
}

std::size_t Dataset::find(std::size_t account, Domain d) const {
  auto it = std::lower_bound(sequences.begin(), sequences.end(), std::make_pair(account, d),
                             [](const InteractionSequence& s, const std::pair<std::size_t, Domain>& k) {
                               return std::make_pair(s.account, s.domain) < k;
                             });
  if (it == sequences.end() || it->account != account || it->domain != d) return npos;
  return static_cast<std::size_t>(it - sequences.begin());
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto& s = sequences[i];
    const std::string where = "sequence " + std::to_string(i);
    if (s.account >= n_accounts()) throw DataError(where + ": account out of range");
    if (s.events.empty()) throw DataError(where + ": no events");
    if (i > 0 && std::make_pair(sequences[i - 1].account, sequences[i - 1].domain) >=
                     std::make_pair(s.account, s.domain)) {
      throw DataError(where + ": sequences not ordered by unique (account, domain)");
    }
    for (std::size_t e = 0; e < s.events.size(); ++e) {
      if (s.events[e].item >= n_items(s.domain)) {
        throw DataError(where + ", event " + std::to_string(e) + ": item out of range");
      }
      if (e > 0 && s.events[e].timestamp < s.events[e - 1].timestamp) {
        throw DataError(where + ", event " + std::to_string(e) + ": timestamps decrease");
      }
    }
  }
  if (!split.empty() && split.size() != sequences.size()) {
    throw DataError("split tags do not match the sequence count");
  }
}

namespace {

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  return order;
}

std::size_t rounded_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

}  // namespace

Dataset split(const Dataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split: fraction must lie in (0, 1), got " + std::to_string(fraction));
  }
  Dataset out = dataset;
  const std::size_t n = out.sequences.size();
  const auto order = shuffled(n, seed);
  const std::size_t n_train = rounded_count(fraction, n);
  out.split.assign(n, SplitTag::Test);
  for (std::size_t i = 0; i < n_train; ++i) out.split[order[i]] = SplitTag::Train;
  return out;
}

Dataset subsample(const Dataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("subsample: fraction must lie in (0, 1], got " + std::to_string(fraction));
  }
  const std::size_t n = dataset.sequences.size();
  auto order = shuffled(n, seed);
  order.resize(rounded_count(fraction, n));
  std::sort(order.begin(), order.end());
  Dataset out;
  out.account_ids = dataset.account_ids;
  out.item_ids[0] = dataset.item_ids[0];
  out.item_ids[1] = dataset.item_ids[1];
  out.unsorted_sequences = dataset.unsorted_sequences;
  for (std::size_t i : order) {
    out.sequences.push_back(dataset.sequences[i]);
    if (dataset.split.size() == n) out.split.push_back(dataset.split[i]);
  }
  return out;
}

}  // namespace tidagcn
