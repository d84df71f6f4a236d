#pragma once

#include <cstdint>
#include <vector>

#include "tidagcn/numeric/tensor.hpp"

namespace tidagcn::detail {

// Gradient buffer of the i-th parent, or nullptr if that parent is untracked.
inline std::vector<double>* parent_grad(Node& self, std::size_t i) {
  if (i >= self.parents.size()) return nullptr;
  Node& p = *self.parents[i];
  return p.requires_grad ? &p.ensure_grad() : nullptr;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from a counter-based hash.
inline double hash_uniform(std::uint64_t seed, std::uint64_t i) {
  return static_cast<double>(splitmix64(seed ^ splitmix64(i)) >> 11) * 0x1.0p-53;
}

}  // namespace tidagcn::detail
