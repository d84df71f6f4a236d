#include "tidagcn/eval/metrics.hpp"

#include <string>

#include "tidagcn/numeric/errors.hpp"

namespace tidagcn {

std::size_t rank(std::span<const double> scores, std::size_t target) {
  if (target >= scores.size()) {
    throw IndexError("rank: target " + std::to_string(target) + " out of " +
                     std::to_string(scores.size()) + " items");
  }
  const double t = scores[target];
  std::size_t r = 1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > t || (scores[i] == t && i < target)) ++r;
  }
  return r;
}

double recall_at(std::span<const std::size_t> ranks, std::size_t n) {
  if (n == 0) throw ConfigError("recall_at: n must be >= 1");
  if (ranks.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t r : ranks) hits += r <= n ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double mrr_at(std::span<const std::size_t> ranks, std::size_t n) {
  if (n == 0) throw ConfigError("mrr_at: n must be >= 1");
  if (ranks.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t r : ranks) sum += r <= n ? 1.0 / static_cast<double>(r) : 0.0;
  return sum / static_cast<double>(ranks.size());
}

}  // namespace tidagcn
