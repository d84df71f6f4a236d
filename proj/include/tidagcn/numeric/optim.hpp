#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tidagcn/numeric/tensor.hpp"

namespace tidagcn {

// Uniform Glorot initialization in +-sqrt(6 / (fan_in + fan_out)).
// Rank-2 shapes use (rows, cols) as fans; rank-1 shapes use n for both.
Tensor xavier_init(const Shape& shape, std::uint64_t seed);
// Same distribution with explicit fans, e.g. for embedding lookup tables whose
// rows feed d x d layers.
Tensor xavier_init(const Shape& shape, std::size_t fan_in, std::size_t fan_out, std::uint64_t seed);
double xavier_limit(const Shape& shape);

struct AdamState {
  std::int64_t step_count = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<std::vector<double>> m;  // first moments, one buffer per parameter
  std::vector<std::vector<double>> v;  // second moments
};

// One bias-corrected Adam update using explicit gradients. Moment buffers are
// created on the first call; shapes must mirror the parameters.
void adam_step(std::span<Tensor> params, std::span<const std::span<const double>> grads,
               AdamState& state);

// Same, reading each parameter's accumulated gradient (absent = zero).
void adam_step(std::span<Tensor> params, AdamState& state);

}  // namespace tidagcn
