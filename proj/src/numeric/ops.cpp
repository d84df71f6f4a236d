#include "tidagcn/numeric/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/kernels.hpp"
#include "op_util.hpp"

namespace tidagcn {

using detail::Node;
using detail::parent_grad;

namespace {

void require_matrix(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a matrix, got shape " +
                         shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw DimensionError("matmul: inner dimensions differ, " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  kernels::active().gemm_nn(m, k, n, a.data().data(), b.data().data(), out.data());
  return detail::make_result({m, n}, std::move(out), {a, b}, [a, b, m, k, n](Node& self) {
    const auto& kt = kernels::active();
    if (auto* ga = parent_grad(self, 0)) kt.gemm_nt(m, n, k, self.grad.data(), b.data().data(), ga->data());
    if (auto* gb = parent_grad(self, 1)) kt.gemm_tn(m, k, n, a.data().data(), self.grad.data(), gb->data());
  });
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul_nt");
  require_matrix(b, "matmul_nt");
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  if (b.cols() != k) {
    throw DimensionError("matmul_nt: inner dimensions differ, " + shape_string(a.shape()) +
                         " x " + shape_string(b.shape()) + "^T");
  }
  std::vector<double> out(m * n, 0.0);
  kernels::active().gemm_nt(m, k, n, a.data().data(), b.data().data(), out.data());
  return detail::make_result({m, n}, std::move(out), {a, b}, [a, b, m, k, n](Node& self) {
    const auto& kt = kernels::active();
    // dA = dC * B ; dB = dC^T * A
    if (auto* ga = parent_grad(self, 0)) kt.gemm_nn(m, n, k, self.grad.data(), b.data().data(), ga->data());
    if (auto* gb = parent_grad(self, 1)) kt.gemm_tn(m, n, k, self.grad.data(), a.data().data(), gb->data());
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto bd = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bd[i];
  return detail::make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (std::size_t p = 0; p < 2; ++p) {
      if (auto* g = parent_grad(self, p)) {
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i];
      }
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto bd = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bd[i];
  return detail::make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    if (auto* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i];
    }
    if (auto* g = parent_grad(self, 1)) {
      for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  const auto ad = a.data(), bd = b.data();
  std::vector<double> out(ad.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] * bd[i];
  return detail::make_result(a.shape(), std::move(out), {a, b}, [a, b](Node& self) {
    const auto& kt = kernels::active();
    if (auto* g = parent_grad(self, 0)) kt.hadamard_acc(self.grad.data(), b.data().data(), g->data(), g->size());
    if (auto* g = parent_grad(self, 1)) kt.hadamard_acc(self.grad.data(), a.data().data(), g->data(), g->size());
  });
}

Tensor scale(const Tensor& a, double c) {
  std::vector<double> out(a.data().begin(), a.data().end());
  for (double& v : out) v *= c;
  return detail::make_result(a.shape(), std::move(out), {a}, [c](Node& self) {
    if (auto* g = parent_grad(self, 0)) kernels::active().axpy(c, self.grad.data(), g->data(), g->size());
  });
}

Tensor add_row_bias(const Tensor& a, const Tensor& bias) {
  require_matrix(a, "add_row_bias");
  const std::size_t m = a.rows(), n = a.cols();
  if (bias.size() != n) {
    throw DimensionError("add_row_bias: bias " + shape_string(bias.shape()) + " vs rows of " +
                         shape_string(a.shape()));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto bd = bias.data();
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] += bd[c];
  }
  return detail::make_result(a.shape(), std::move(out), {a, bias}, [m, n](Node& self) {
    if (auto* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i];
    }
    if (auto* g = parent_grad(self, 1)) {
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) (*g)[c] += self.grad[r * n + c];
      }
    }
  });
}

Tensor leaky_relu(const Tensor& x, double slope) {
  if (!(slope > 0.0 && slope < 1.0)) {
    throw ConfigError("leaky_relu: slope must lie in (0, 1), got " + std::to_string(slope));
  }
  const auto xd = x.data();
  std::vector<double> out(xd.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xd[i] >= 0.0 ? xd[i] : slope * xd[i];
  return detail::make_result(x.shape(), std::move(out), {x}, [x, slope](Node& self) {
    if (auto* g = parent_grad(self, 0)) {
      const auto xd = x.data();
      for (std::size_t i = 0; i < g->size(); ++i) {
        (*g)[i] += xd[i] >= 0.0 ? self.grad[i] : slope * self.grad[i];
      }
    }
  });
}

Tensor relu(const Tensor& x) {
  const auto xd = x.data();
  std::vector<double> out(xd.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xd[i] > 0.0 ? xd[i] : 0.0;
  return detail::make_result(x.shape(), std::move(out), {x}, [x](Node& self) {
    if (auto* g = parent_grad(self, 0)) {
      const auto xd = x.data();
      for (std::size_t i = 0; i < g->size(); ++i) {
        if (xd[i] > 0.0) (*g)[i] += self.grad[i];
      }
    }
  });
}

Tensor softmax_rows(const Tensor& x) {
  const std::size_t m = x.rows(), n = x.cols();
  const auto xd = x.data();
  std::vector<double> out(xd.size());
  for (std::size_t r = 0; r < m; ++r) {
    const double* row = xd.data() + r * n;
    double* o = out.data() + r * n;
    const double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      o[c] = std::exp(row[c] - mx);
      z += o[c];
    }
    for (std::size_t c = 0; c < n; ++c) o[c] /= z;
  }
  auto result = detail::make_result(x.shape(), std::move(out), {x}, nullptr);
  if (result.requires_grad()) {
    // The closure reads the output through the node it is attached to.
    result.node()->backward = [m, n](Node& self) {
      if (auto* g = parent_grad(self, 0)) {
        for (std::size_t r = 0; r < m; ++r) {
          const double* y = self.value.data() + r * n;
          const double* gy = self.grad.data() + r * n;
          const double d = kernels::active().dot(y, gy, n);
          for (std::size_t c = 0; c < n; ++c) (*g)[r * n + c] += y[c] * (gy[c] - d);
        }
      }
    };
  }
  return result;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  const std::size_t d = x.shape().empty() ? 1 : x.shape().back();
  if (gain.size() != d || bias.size() != d) {
    throw DimensionError("layer_norm: last dimension " + std::to_string(d) + " vs gain " +
                         shape_string(gain.shape()) + " / bias " + shape_string(bias.shape()));
  }
  const std::size_t m = x.size() / d;
  const auto xd = x.data(), gd = gain.data(), bd = bias.data();
  std::vector<double> xhat(xd.size());
  std::vector<double> inv_std(m);
  std::vector<double> out(xd.size());
  for (std::size_t r = 0; r < m; ++r) {
    const double* row = xd.data() + r * d;
    double mu = 0.0;
    for (std::size_t c = 0; c < d; ++c) mu += row[c];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) var += (row[c] - mu) * (row[c] - mu);
    var /= static_cast<double>(d);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < d; ++c) {
      xhat[r * d + c] = (row[c] - mu) * inv_std[r];
      out[r * d + c] = gd[c] * xhat[r * d + c] + bd[c];
    }
  }
  return detail::make_result(
      x.shape(), std::move(out), {x, gain, bias},
      [gain, m, d, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
        const auto gd = gain.data();
        if (auto* gx = parent_grad(self, 0)) {
          for (std::size_t r = 0; r < m; ++r) {
            const double* gy = self.grad.data() + r * d;
            const double* xh = xhat.data() + r * d;
            double mean_g = 0.0, mean_gx = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
              const double gh = gy[c] * gd[c];
              mean_g += gh;
              mean_gx += gh * xh[c];
            }
            mean_g /= static_cast<double>(d);
            mean_gx /= static_cast<double>(d);
            for (std::size_t c = 0; c < d; ++c) {
              const double gh = gy[c] * gd[c];
              (*gx)[r * d + c] += inv_std[r] * (gh - mean_g - xh[c] * mean_gx);
            }
          }
        }
        if (auto* gg = parent_grad(self, 1)) {
          for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < d; ++c) (*gg)[c] += self.grad[r * d + c] * xhat[r * d + c];
          }
        }
        if (auto* gb = parent_grad(self, 2)) {
          for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < d; ++c) (*gb)[c] += self.grad[r * d + c];
          }
        }
      });
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> idx) {
  require_matrix(x, "gather_rows");
  const std::size_t n = x.cols(), rows = x.rows();
  const auto xd = x.data();
  std::vector<double> out(idx.size() * n);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= rows) {
      throw IndexError("gather_rows: row " + std::to_string(idx[i]) + " out of " +
                       std::to_string(rows));
    }
    std::copy_n(xd.data() + idx[i] * n, n, out.data() + i * n);
  }
  std::vector<std::size_t> rows_copy(idx.begin(), idx.end());
  return detail::make_result({idx.size(), n}, std::move(out), {x},
                             [n, rows_copy = std::move(rows_copy)](Node& self) {
                               if (auto* g = parent_grad(self, 0)) {
                                 for (std::size_t i = 0; i < rows_copy.size(); ++i) {
                                   double* dst = g->data() + rows_copy[i] * n;
                                   const double* src = self.grad.data() + i * n;
                                   for (std::size_t c = 0; c < n; ++c) dst[c] += src[c];
                                 }
                               }
                             });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  require_matrix(a, "concat_cols");
  require_matrix(b, "concat_cols");
  if (a.rows() != b.rows()) {
    throw DimensionError("concat_cols: row counts differ, " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
  const std::size_t m = a.rows(), na = a.cols(), nb = b.cols(), n = na + nb;
  const auto ad = a.data(), bd = b.data();
  std::vector<double> out(m * n);
  for (std::size_t r = 0; r < m; ++r) {
    std::copy_n(ad.data() + r * na, na, out.data() + r * n);
    std::copy_n(bd.data() + r * nb, nb, out.data() + r * n + na);
  }
  return detail::make_result({m, n}, std::move(out), {a, b}, [m, na, nb, n](Node& self) {
    if (auto* g = parent_grad(self, 0)) {
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < na; ++c) (*g)[r * na + c] += self.grad[r * n + c];
      }
    }
    if (auto* g = parent_grad(self, 1)) {
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < nb; ++c) (*g)[r * nb + c] += self.grad[r * n + na + c];
      }
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) {
    throw DimensionError("reshape: " + shape_string(x.shape()) + " to " + shape_string(shape));
  }
  return detail::make_result(std::move(shape), {x.data().begin(), x.data().end()}, {x},
                             [](Node& self) {
                               if (auto* g = parent_grad(self, 0)) {
                                 for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i];
                               }
                             });
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return detail::make_result({}, {s}, {x}, [](Node& self) {
    if (auto* g = parent_grad(self, 0)) {
      for (double& v : *g) v += self.grad[0];
    }
  });
}

Tensor mean(const Tensor& x) {
  if (x.size() == 0) throw DimensionError("mean of an empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.size()));
}

Tensor dropout(const Tensor& x, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout: rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = detail::hash_uniform(seed, i) < rate ? 0.0 : keep_scale;
  }
  return mul(x, Tensor::from(x.shape(), std::move(mask)));
}

Tensor cross_entropy_logits(const Tensor& logits, std::span<const std::size_t> targets) {
  require_matrix(logits, "cross_entropy_logits");
  const std::size_t m = logits.rows(), n = logits.cols();
  if (targets.size() != m) {
    throw DimensionError("cross_entropy_logits: " + std::to_string(targets.size()) +
                         " targets for " + std::to_string(m) + " rows");
  }
  if (m == 0) throw DimensionError("cross_entropy_logits: no rows");
  const auto ld = logits.data();
  std::vector<double> probs(m * n);
  double loss = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (targets[r] >= n) {
      throw IndexError("cross_entropy: target " + std::to_string(targets[r]) + " out of " +
                       std::to_string(n));
    }
    const double* row = ld.data() + r * n;
    const double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      probs[r * n + c] = std::exp(row[c] - mx);
      z += probs[r * n + c];
    }
    for (std::size_t c = 0; c < n; ++c) probs[r * n + c] /= z;
    loss += -(row[targets[r]] - mx - std::log(z));
  }
  loss /= static_cast<double>(m);
  std::vector<std::size_t> tg(targets.begin(), targets.end());
  return detail::make_result({}, {loss}, {logits},
                             [m, n, probs = std::move(probs), tg = std::move(tg)](Node& self) {
                               if (auto* g = parent_grad(self, 0)) {
                                 const double s = self.grad[0] / static_cast<double>(m);
                                 for (std::size_t r = 0; r < m; ++r) {
                                   for (std::size_t c = 0; c < n; ++c) {
                                     (*g)[r * n + c] += s * probs[r * n + c];
                                   }
                                   (*g)[r * n + tg[r]] -= s;
                                 }
                               }
                             });
}

Tensor cross_entropy_probs(const Tensor& probs, std::span<const std::size_t> targets) {
  require_matrix(probs, "cross_entropy_probs");
  const std::size_t m = probs.rows(), n = probs.cols();
  if (targets.size() != m) {
    throw DimensionError("cross_entropy_probs: " + std::to_string(targets.size()) +
                         " targets for " + std::to_string(m) + " rows");
  }
  if (m == 0) throw DimensionError("cross_entropy_probs: no rows");
  const auto pd = probs.data();
  double loss = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (targets[r] >= n) {
      throw IndexError("cross_entropy: target " + std::to_string(targets[r]) + " out of " +
                       std::to_string(n));
    }
    const double p = std::max(pd[r * n + targets[r]], std::numeric_limits<double>::min());
    loss -= std::log(p);
  }
  loss /= static_cast<double>(m);
  std::vector<std::size_t> tg(targets.begin(), targets.end());
  return detail::make_result({}, {loss}, {probs}, [probs, m, n, tg = std::move(tg)](Node& self) {
    if (auto* g = parent_grad(self, 0)) {
      const auto pd = probs.data();
      for (std::size_t r = 0; r < m; ++r) {
        const double p = std::max(pd[r * n + tg[r]], std::numeric_limits<double>::min());
        (*g)[r * n + tg[r]] -= self.grad[0] / (static_cast<double>(m) * p);
      }
    }
  });
}

}  // namespace tidagcn
