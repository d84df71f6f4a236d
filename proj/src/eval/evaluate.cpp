#include "tidagcn/eval/evaluate.hpp"

#include <chrono>

#include "tidagcn/eval/metrics.hpp"
#include "tidagcn/numeric/ops.hpp"

namespace tidagcn {

ExampleRanks rank_examples(const Recommender& model, std::span<const SequenceExample> examples) {
  NoGradGuard no_grad;
  ExampleRanks out;
  const Tensor nodes = model.propagate(false, 0).final();
  const std::size_t bs = model.config().batch_size;
  for (std::size_t begin = 0; begin < examples.size(); begin += bs) {
    const auto batch = examples.subspan(begin, std::min(bs, examples.size() - begin));
    const BatchOutput o = model.forward(nodes, batch, false);
    for (std::size_t d = 0; d < 2; ++d) {
      if (!o.logits[d].defined()) continue;
      const Tensor probs = softmax_rows(o.logits[d]);
      const std::size_t n = probs.cols();
      for (std::size_t r = 0; r < o.targets[d].size(); ++r) {
        out.ranks[d].push_back(rank(probs.data().subspan(r * n, n), o.targets[d][r]));
      }
    }
  }
  return out;
}

DomainMetrics summarize(std::vector<std::size_t> ranks) {
  DomainMetrics m;
  m.present = !ranks.empty();
  m.n_evaluated = ranks.size();
  m.recall_at_5 = recall_at(ranks, 5);
  m.recall_at_20 = recall_at(ranks, 20);
  m.mrr_at_5 = mrr_at(ranks, 5);
  m.mrr_at_20 = mrr_at(ranks, 20);
  m.ranks = std::move(ranks);
  return m;
}

EvalReport evaluate(const Recommender& model, const Dataset& dataset) {
  const auto t0 = std::chrono::steady_clock::now();
  // Ranking always scores the final item, so prefix training must not
  // expand evaluation examples.
  const EvaluationExamples ev = evaluation_examples(dataset, model.config());
  ExampleRanks ranks = rank_examples(model, ev.examples);
  EvalReport report;
  report.n_test_sequences = dataset.test_indices().size();
  report.config = model.config();
  report.config_fingerprint = config_fingerprint(model.config());
  for (std::size_t d = 0; d < 2; ++d) {
    report.domain[d] = summarize(std::move(ranks.ranks[d]));
    report.domain[d].skipped_short = ev.skipped_short[d];
  }
  report.wall_clock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace tidagcn
