#include "tidagcn/model/objective.hpp"

#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/ops.hpp"

namespace tidagcn {

Tensor prediction_logits(const Tensor& h_a, const Tensor& h_b, const ModelParameters& params,
                         Domain domain) {
  if (h_a.rank() != 2 || h_b.rank() != 2 || h_a.rows() != h_b.rows()) {
    throw DimensionError("predict: h_A " + shape_string(h_a.shape()) + " and h_B " +
                         shape_string(h_b.shape()) + " must be matrices with equal rows");
  }
  const Tensor& w = domain == Domain::A ? params.w_a : params.w_b;
  const Tensor& b = domain == Domain::A ? params.b_a : params.b_b;
  return add_row_bias(matmul_nt(concat_cols(h_a, h_b), w), b);
}

Tensor predict(const Tensor& h_a, const Tensor& h_b, const ModelParameters& params,
               Domain domain) {
  return softmax_rows(prediction_logits(h_a, h_b, params, domain));
}

Tensor cross_entropy_loss(const Tensor& probs, std::span<const std::size_t> targets) {
  return cross_entropy_probs(probs, targets);
}

Tensor joint_loss(const Tensor& loss_a, const Tensor& loss_b) { return add(loss_a, loss_b); }

double joint_loss(double loss_a, double loss_b) { return loss_a + loss_b; }

}  // namespace tidagcn
