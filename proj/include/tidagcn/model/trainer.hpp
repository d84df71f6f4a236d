#pragma once

// Mini-batch training with Adam on the joint loss L_A + L_B.
//
// Epoch 0 of the trace is the loss of the untrained model (no dropout, no
// update). Each later epoch shuffles the examples with the run seed, runs
// propagation and encoding per batch, and records instance-weighted mean
// losses over the epoch's batches.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tidagcn/data/dataset.hpp"
#include "tidagcn/model/model.hpp"

namespace tidagcn {

struct EpochRecord {
  std::size_t epoch = 0;
  double joint_loss = 0.0;
  double loss_a = 0.0;
  double loss_b = 0.0;
  double wall_clock_ms = 0.0;
};

struct TrainingTrace {
  std::vector<EpochRecord> epochs;

  // Header "epoch,joint_loss,loss_a,loss_b,wall_clock_ms"; losses in shortest
  // round-trip form. wall_clock_ms stays empty unless with_wall_clock, which
  // keeps traces of equal seeds byte-identical.
  std::string to_csv(bool with_wall_clock) const;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Throws NumericError naming the epoch and batch when a loss is not finite.
TrainingTrace train(Recommender& model, std::span<const SequenceExample> examples,
                    const EpochCallback& on_epoch = {});
TrainingTrace train(Recommender& model, const Dataset& dataset, const EpochCallback& on_epoch = {});

// Losses of the current parameters without dropout or updates.
EpochRecord evaluate_loss(const Recommender& model, std::span<const SequenceExample> examples);

}  // namespace tidagcn
