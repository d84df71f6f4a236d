#pragma once

// Ranking metrics over held-out next items.

#include <cstddef>
#include <span>

namespace tidagcn {

// 1-based rank of `target`: 1 + items scored strictly higher + equally scored
// items with a smaller id. Throws IndexError for an invalid target.
std::size_t rank(std::span<const double> scores, std::size_t target);

// Fraction of ranks <= n (0 for no ranks). Throws ConfigError for n == 0.
double recall_at(std::span<const std::size_t> ranks, std::size_t n);

// Mean of 1/rank over ranks <= n, zero elsewhere (0 for no ranks).
double mrr_at(std::span<const std::size_t> ranks, std::size_t n);

}  // namespace tidagcn
