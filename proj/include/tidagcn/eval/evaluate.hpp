#pragma once

// Held-out evaluation: for every test sequence, rank its last item among all
// items of its domain given the rest of the sequence and the account's
// other-domain sequence.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tidagcn/data/dataset.hpp"
#include "tidagcn/model/model.hpp"

namespace tidagcn {

struct DomainMetrics {
  bool present = false;  // false when no sequence was evaluated
  std::size_t n_evaluated = 0;
  std::size_t skipped_short = 0;
  double recall_at_5 = 0.0, recall_at_20 = 0.0;
  double mrr_at_5 = 0.0, mrr_at_20 = 0.0;
  std::vector<std::size_t> ranks;
};

struct EvalReport {
  std::string variant = "tida";
  DomainMetrics domain[2];
  std::size_t n_test_sequences = 0;
  std::string config_fingerprint;
  TrainingConfig config;
  double wall_clock_ms = 0.0;
};

// Per-domain ranks of every target of `examples` (probabilities from a
// no-dropout forward pass; ties by smaller item id).
struct ExampleRanks {
  std::vector<std::size_t> ranks[2];
};
ExampleRanks rank_examples(const Recommender& model, std::span<const SequenceExample> examples);

DomainMetrics summarize(std::vector<std::size_t> ranks);

// `dataset` must carry split tags; only its test sequences are ranked.
EvalReport evaluate(const Recommender& model, const Dataset& dataset);

}  // namespace tidagcn
