#include <cmath>
#include <string>

#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/optim.hpp"

namespace tidagcn {

void adam_step(std::span<Tensor> params, std::span<const std::span<const double>> grads,
               AdamState& state) {
  if (grads.size() != params.size()) {
    throw DimensionError("adam_step: " + std::to_string(grads.size()) + " gradients for " +
                         std::to_string(params.size()) + " parameters");
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw DimensionError("adam_step: optimizer state tracks " + std::to_string(state.m.size()) +
                         " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].size() != params[i].size() || state.m[i].size() != params[i].size()) {
      throw DimensionError("adam_step: gradient " + std::to_string(i) + " has " +
                           std::to_string(grads[i].size()) + " values for parameter " +
                           shape_string(params[i].shape()));
    }
  }

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].mutable_data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto g = grads[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p[j] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

void adam_step(std::span<Tensor> params, AdamState& state) {
  std::vector<std::vector<double>> zeros;
  std::vector<std::span<const double>> grads;
  grads.reserve(params.size());
  zeros.reserve(params.size());
  for (auto& p : params) {
    if (p.has_grad()) {
      grads.push_back(p.grad());
    } else {
      zeros.emplace_back(p.size(), 0.0);
      grads.emplace_back(zeros.back());
    }
  }
  adam_step(params, grads, state);
}

}  // namespace tidagcn
