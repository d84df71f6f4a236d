#pragma once

// The full recommender: CDS-graph propagation, sequence encoding of both
// domains, and per-domain prediction over all items.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tidagcn/data/dataset.hpp"
#include "tidagcn/graph/cds_graph.hpp"
#include "tidagcn/model/config.hpp"
#include "tidagcn/model/params.hpp"
#include "tidagcn/model/propagation.hpp"
#include "tidagcn/numeric/tensor.hpp"

namespace tidagcn {

// One prediction problem: encode `input` (domain-local items of `domain`),
// encode `context` (items of the other domain, possibly empty), and predict
// `targets` in `domain`. targets has one entry (next item after the input) or,
// under prefix training, one entry per input position.
struct SequenceExample {
  std::size_t sequence = 0;  // index into Dataset::sequences
  std::size_t account = 0;
  Domain domain = Domain::A;
  std::vector<std::size_t> input;
  std::vector<std::size_t> context;
  std::vector<std::size_t> targets;
};

// Training examples from every train sequence with >= 2 events: the input is
// the sequence without its last event, truncated to the latest max_len. The
// context is the other-domain sequence of the account, without its last event
// when that sequence is held out for testing.
std::vector<SequenceExample> training_examples(const Dataset& dataset, const TrainingConfig& config);

struct EvaluationExamples {
  std::vector<SequenceExample> examples;
  std::size_t skipped_short[2] = {0, 0};  // test sequences with < 2 events, per domain
};

// Evaluation examples from every test sequence: last event held out, the
// other-domain sequence used in full as context.
EvaluationExamples evaluation_examples(const Dataset& dataset, const TrainingConfig& config);

// Per-domain prediction rows of one forward pass.
struct BatchOutput {
  Tensor logits[2];                        // [rows x items of domain]; undefined if no rows
  std::vector<std::size_t> targets[2];     // per row
  std::vector<std::size_t> example_of[2];  // per row: index into the batch
};

// Graph over the train split of `dataset` (every sequence when unsplit).
CdsGraph build_training_graph(const Dataset& dataset, const TrainingConfig& config);

class Recommender {
 public:
  Recommender(CdsGraph graph, ModelParameters params, TrainingConfig config);

  // Fresh parameters for the graph's sizes (seeded by config.seed).
  static Recommender create(const Dataset& dataset, const TrainingConfig& config);

  const CdsGraph& graph() const { return graph_; }
  const TrainingConfig& config() const { return config_; }
  ModelParameters& params() { return params_; }
  const ModelParameters& params() const { return params_; }

  // Node representations for this parameter state.
  NodeRepresentations propagate(bool training, std::uint64_t dropout_seed) const;

  // Encodes and scores a batch against precomputed node representations.
  BatchOutput forward(const Tensor& nodes, std::span<const SequenceExample> batch,
                      bool training) const;
  // Convenience: propagate then forward.
  BatchOutput forward(std::span<const SequenceExample> batch, bool training,
                      std::uint64_t dropout_seed) const;

  // Pooled sequence representations [rows x d] for the given domain-local
  // item lists of `domain` (one row per list), using the account embeddings.
  Tensor encode_sequences(const Tensor& nodes, Domain domain,
                          std::span<const std::vector<std::size_t>> items,
                          std::span<const std::size_t> accounts) const;

 private:
  CdsGraph graph_;
  ModelParameters params_;
  TrainingConfig config_;
};

}  // namespace tidagcn
