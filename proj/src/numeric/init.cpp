#include <cmath>

#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/optim.hpp"
#include "tidagcn/numeric/random.hpp"

namespace tidagcn {

double xavier_limit(const Shape& shape) {
  if (shape.empty() || shape_size(shape) == 0) {
    throw DimensionError("xavier_init: empty shape " + shape_string(shape));
  }
  double fan_in, fan_out;
  if (shape.size() == 1) {
    fan_in = fan_out = static_cast<double>(shape[0]);
  } else {
    fan_in = static_cast<double>(shape[0]);
    fan_out = static_cast<double>(shape_size(shape) / shape[0]);
  }
  return std::sqrt(6.0 / (fan_in + fan_out));
}

Tensor xavier_init(const Shape& shape, std::uint64_t seed) {
  const double limit = xavier_limit(shape);
  Rng rng(seed);
  std::vector<double> values(shape_size(shape));
  for (double& v : values) v = rng.uniform(-limit, limit);
  return Tensor::parameter(shape, std::move(values));
}

Tensor xavier_init(const Shape& shape, std::size_t fan_in, std::size_t fan_out,
                   std::uint64_t seed) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Rng rng(seed);
  std::vector<double> values(shape_size(shape));
  for (double& v : values) v = rng.uniform(-limit, limit);
  return Tensor::parameter(shape, std::move(values));
}

}  // namespace tidagcn
