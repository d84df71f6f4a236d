#include "tidagcn/model/trainer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "tidagcn/data/keyvalue.hpp"
#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/ops.hpp"
#include "tidagcn/numeric/optim.hpp"
#include "tidagcn/numeric/random.hpp"

namespace tidagcn {
namespace {

struct BatchLoss {
  Tensor joint;
  double loss[2] = {0.0, 0.0};
  std::size_t rows[2] = {0, 0};
};

BatchLoss batch_loss(const BatchOutput& out) {
  BatchLoss b;
  for (std::size_t d = 0; d < 2; ++d) {
    if (!out.logits[d].defined()) continue;
    const Tensor l = cross_entropy_logits(out.logits[d], out.targets[d]);
    b.loss[d] = l.item();
    b.rows[d] = out.targets[d].size();
    b.joint = b.joint.defined() ? add(b.joint, l) : l;
  }
  return b;
}

// Accumulates instance-weighted per-domain means.
struct LossMeter {
  double sum[2] = {0.0, 0.0};
  std::size_t rows[2] = {0, 0};

  void add(const BatchLoss& b) {
    for (std::size_t d = 0; d < 2; ++d) {
      sum[d] += b.loss[d] * static_cast<double>(b.rows[d]);
      rows[d] += b.rows[d];
    }
  }

  EpochRecord record(std::size_t epoch) const {
    EpochRecord r;
    r.epoch = epoch;
    r.loss_a = rows[0] ? sum[0] / static_cast<double>(rows[0]) : 0.0;
    r.loss_b = rows[1] ? sum[1] / static_cast<double>(rows[1]) : 0.0;
    r.joint_loss = r.loss_a + r.loss_b;
    return r;
  }
};

void check_finite(const BatchLoss& b, std::size_t epoch, std::size_t batch,
                  std::span<const SequenceExample> examples) {
  if (std::isfinite(b.loss[0]) && std::isfinite(b.loss[1])) return;
  std::ostringstream msg;
  msg << "non-finite loss at epoch " << epoch << ", batch " << batch << " (loss_a=" << b.loss[0]
      << ", loss_b=" << b.loss[1] << "; sequences";
  for (std::size_t i = 0; i < examples.size() && i < 8; ++i) msg << ' ' << examples[i].sequence;
  if (examples.size() > 8) msg << " ...";
  msg << ')';
  throw NumericError(msg.str());
}

std::uint64_t batch_seed(std::uint64_t seed, std::size_t epoch, std::size_t batch) {
  std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (epoch + 1)) ^ (0xD1B54A32D192ED03ULL * (batch + 1));
  x = (x ^ (x >> 31)) * 0xBF58476D1CE4E5B9ULL;
  return x ^ (x >> 29);
}

}  // namespace

std::string TrainingTrace::to_csv(bool with_wall_clock) const {
  std::ostringstream o;
  o << "epoch,joint_loss,loss_a,loss_b,wall_clock_ms\n";
  for (const auto& r : epochs) {
    o << r.epoch << ',' << format_double(r.joint_loss) << ',' << format_double(r.loss_a) << ','
      << format_double(r.loss_b) << ',';
    if (with_wall_clock) o << format_double(std::round(r.wall_clock_ms * 1000.0) / 1000.0);
    o << '\n';
  }
  return o.str();
}

EpochRecord evaluate_loss(const Recommender& model, std::span<const SequenceExample> examples) {
  NoGradGuard no_grad;
  const Tensor nodes = model.propagate(false, 0).final();
  LossMeter meter;
  const std::size_t bs = model.config().batch_size;
  for (std::size_t begin = 0; begin < examples.size(); begin += bs) {
    const auto batch = examples.subspan(begin, std::min(bs, examples.size() - begin));
    const BatchLoss b = batch_loss(model.forward(nodes, batch, true));
    check_finite(b, 0, begin / bs, batch);
    meter.add(b);
  }
  return meter.record(0);
}

TrainingTrace train(Recommender& model, std::span<const SequenceExample> examples,
                    const EpochCallback& on_epoch) {
  using clock = std::chrono::steady_clock;
  const TrainingConfig& cfg = model.config();
  TrainingTrace trace;
  {
    const auto t0 = clock::now();
    EpochRecord r = evaluate_loss(model, examples);
    r.wall_clock_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    trace.epochs.push_back(r);
    if (on_epoch) on_epoch(r);
  }
  if (examples.empty()) return trace;

  auto params = model.params().all();
  AdamState adam;
  adam.lr = cfg.lr;
  Rng rng(cfg.seed ^ 0x5DEECE66DULL);
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<SequenceExample> batch;

  for (std::size_t epoch = 1; epoch <= cfg.n_epochs; ++epoch) {
    const auto t0 = clock::now();
    rng.shuffle(order);
    LossMeter meter;
    for (std::size_t begin = 0, b = 0; begin < order.size(); begin += cfg.batch_size, ++b) {
      batch.clear();
      for (std::size_t i = begin; i < std::min(order.size(), begin + cfg.batch_size); ++i) {
        batch.push_back(examples[order[i]]);
      }
      for (auto& p : params) p.zero_grad();
      const Tensor nodes = model.propagate(true, batch_seed(cfg.seed, epoch, b)).final();
      const BatchLoss loss = batch_loss(model.forward(nodes, batch, true));
      check_finite(loss, epoch, b, batch);
      loss.joint.backward();
      adam_step(params, adam);
      meter.add(loss);
    }
    EpochRecord r = meter.record(epoch);
    r.wall_clock_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    trace.epochs.push_back(r);
    if (on_epoch) on_epoch(r);
  }
  return trace;
}

TrainingTrace train(Recommender& model, const Dataset& dataset, const EpochCallback& on_epoch) {
  const auto examples = training_examples(dataset, model.config());
  return train(model, examples, on_epoch);
}

}  // namespace tidagcn
