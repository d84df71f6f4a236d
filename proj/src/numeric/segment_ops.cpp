#include "tidagcn/numeric/segment_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "op_util.hpp"
#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/kernels.hpp"

namespace tidagcn {

using detail::Node;
using detail::parent_grad;

namespace {

void check_offsets(std::span<const std::size_t> offsets, std::size_t n, const char* op) {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != n) {
    throw DimensionError(std::string(op) + ": offsets do not cover " + std::to_string(n) +
                         " entries");
  }
  for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
    if (offsets[g] > offsets[g + 1]) {
      throw DimensionError(std::string(op) + ": offsets not monotone");
    }
  }
}

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) {
  const auto& kt = kernels::active();
  const double na = std::max(std::sqrt(kt.dot(a.data(), a.data(), a.size())), kNormFloor);
  const double nb = std::max(std::sqrt(kt.dot(b.data(), b.data(), b.size())), kNormFloor);
  return kt.dot(a.data(), b.data(), a.size()) / (na * nb);
}

Tensor edge_cosine(const Tensor& x, const CsrPattern& pattern, std::size_t* zero_norm_hits) {
  if (x.rank() != 2 || x.rows() != pattern.n_rows || pattern.n_rows != pattern.n_cols) {
    throw DimensionError("edge_cosine: square pattern over the rows of x required, got " +
                         shape_string(x.shape()));
  }
  const std::size_t n = x.cols();
  const auto& kt = kernels::active();
  const auto xd = x.data();
  std::vector<double> raw_norm(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* row = xd.data() + r * n;
    raw_norm[r] = std::sqrt(kt.dot(row, row, n));
  }
  std::vector<double> out(pattern.nnz());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < pattern.n_rows; ++r) {
    for (std::size_t e = pattern.row_begin(r); e < pattern.row_end(r); ++e) {
      const std::size_t c = pattern.col_idx[e];
      if (raw_norm[r] < kNormFloor || raw_norm[c] < kNormFloor) ++hits;
      if (c == r) {
        out[e] = raw_norm[r] < kNormFloor ? 0.0 : 1.0;
        continue;
      }
      const double na = std::max(raw_norm[r], kNormFloor);
      const double nc = std::max(raw_norm[c], kNormFloor);
      out[e] = kt.dot(xd.data() + r * n, xd.data() + c * n, n) / (na * nc);
    }
  }
  if (zero_norm_hits) *zero_norm_hits += hits;
  auto result = detail::make_result({pattern.nnz()}, std::move(out), {x}, nullptr);
  if (result.requires_grad()) {
    result.node()->backward = [pattern, x, n, raw_norm = std::move(raw_norm)](Node& self) {
      auto* gx = parent_grad(self, 0);
      if (!gx) return;
      const auto& kt = kernels::active();
      const auto xd = x.data();
      for (std::size_t r = 0; r < pattern.n_rows; ++r) {
        for (std::size_t e = pattern.row_begin(r); e < pattern.row_end(r); ++e) {
          const std::size_t c = pattern.col_idx[e];
          const double g = self.grad[e];
          if (c == r || g == 0.0) continue;
          const double na = std::max(raw_norm[r], kNormFloor);
          const double nc = std::max(raw_norm[c], kNormFloor);
          const double cosv = self.value[e];
          const double* xr = xd.data() + r * n;
          const double* xc = xd.data() + c * n;
          // d cos / d x_r = x_c / (na nc) - cos x_r / na^2 (second term vanishes when floored)
          kt.axpy(g / (na * nc), xc, gx->data() + r * n, n);
          kt.axpy(g / (na * nc), xr, gx->data() + c * n, n);
          if (raw_norm[r] >= kNormFloor) kt.axpy(-g * cosv / (na * na), xr, gx->data() + r * n, n);
          if (raw_norm[c] >= kNormFloor) kt.axpy(-g * cosv / (nc * nc), xc, gx->data() + c * n, n);
        }
      }
    };
  }
  return result;
}

Tensor segment_softmax(const Tensor& scores, std::span<const std::size_t> offsets) {
  check_offsets(offsets, scores.size(), "segment_softmax");
  const auto sd = scores.data();
  std::vector<double> out(sd.size());
  for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
    const std::size_t b = offsets[g], e = offsets[g + 1];
    if (b == e) continue;
    const double mx = *std::max_element(sd.begin() + b, sd.begin() + e);
    double z = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      out[i] = std::exp(sd[i] - mx);
      z += out[i];
    }
    for (std::size_t i = b; i < e; ++i) out[i] /= z;
  }
  std::vector<std::size_t> off(offsets.begin(), offsets.end());
  auto result = detail::make_result(scores.shape(), std::move(out), {scores}, nullptr);
  if (result.requires_grad()) {
    result.node()->backward = [off = std::move(off)](Node& self) {
      auto* gs = parent_grad(self, 0);
      if (!gs) return;
      for (std::size_t g = 0; g + 1 < off.size(); ++g) {
        double d = 0.0;
        for (std::size_t i = off[g]; i < off[g + 1]; ++i) d += self.value[i] * self.grad[i];
        for (std::size_t i = off[g]; i < off[g + 1]; ++i) {
          (*gs)[i] += self.value[i] * (self.grad[i] - d);
        }
      }
    };
  }
  return result;
}

Tensor segment_smoothed_softmax(const Tensor& scores, std::span<const std::size_t> offsets,
                                double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ConfigError("smoothing exponent must lie in [0, 1], got " + std::to_string(beta));
  }
  check_offsets(offsets, scores.size(), "segment_smoothed_softmax");
  const auto sd = scores.data();
  std::vector<double> out(sd.size());
  std::vector<double> soft(sd.size());  // plain softmax, needed by the gradient
  for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
    const std::size_t b = offsets[g], e = offsets[g + 1];
    if (b == e) continue;
    const double mx = *std::max_element(sd.begin() + b, sd.begin() + e);
    double z = 0.0;
    for (std::size_t i = b; i < e; ++i) z += std::exp(sd[i] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t i = b; i < e; ++i) {
      out[i] = std::exp(sd[i] - beta * lse);
      soft[i] = std::exp(sd[i] - lse);
    }
  }
  std::vector<std::size_t> off(offsets.begin(), offsets.end());
  auto result = detail::make_result(scores.shape(), std::move(out), {scores}, nullptr);
  if (result.requires_grad()) {
    result.node()->backward = [off = std::move(off), soft = std::move(soft), beta](Node& self) {
      auto* gs = parent_grad(self, 0);
      if (!gs) return;
      // d a_i / d f_j = a_i (delta_ij - beta p_j)
      for (std::size_t g = 0; g + 1 < off.size(); ++g) {
        double ga = 0.0;
        for (std::size_t i = off[g]; i < off[g + 1]; ++i) ga += self.grad[i] * self.value[i];
        for (std::size_t j = off[g]; j < off[g + 1]; ++j) {
          (*gs)[j] += self.grad[j] * self.value[j] - beta * soft[j] * ga;
        }
      }
    };
  }
  return result;
}

Tensor range_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                       std::span<const RowRange> ranges, double scale) {
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2 || q.cols() != k.cols() ||
      k.rows() != v.rows() || ranges.size() != q.rows()) {
    throw DimensionError("range_attention: q " + shape_string(q.shape()) + ", k " +
                         shape_string(k.shape()) + ", v " + shape_string(v.shape()) + ", " +
                         std::to_string(ranges.size()) + " ranges");
  }
  const std::size_t dk = q.cols(), dv = v.cols();
  const auto& kt = kernels::active();
  const auto qd = q.data(), kd = k.data(), vd = v.data();
  std::vector<std::size_t> p_off(ranges.size() + 1, 0);
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const auto& rg = ranges[i];
    if (rg.begin >= rg.end || rg.end > k.rows()) {
      throw IndexError("range_attention: empty or out-of-range key range for query " +
                       std::to_string(i));
    }
    p_off[i + 1] = p_off[i] + (rg.end - rg.begin);
  }
  std::vector<double> probs(p_off.back());
  std::vector<double> out(q.rows() * dv, 0.0);
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const auto& rg = ranges[i];
    double* p = probs.data() + p_off[i];
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = rg.begin; j < rg.end; ++j) {
      p[j - rg.begin] = scale * kt.dot(qd.data() + i * dk, kd.data() + j * dk, dk);
      mx = std::max(mx, p[j - rg.begin]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < rg.end - rg.begin; ++j) {
      p[j] = std::exp(p[j] - mx);
      z += p[j];
    }
    for (std::size_t j = 0; j < rg.end - rg.begin; ++j) {
      p[j] /= z;
      kt.axpy(p[j], vd.data() + (rg.begin + j) * dv, out.data() + i * dv, dv);
    }
  }
  std::vector<RowRange> rgs(ranges.begin(), ranges.end());
  return detail::make_result(
      {q.rows(), dv}, std::move(out), {q, k, v},
      [q, k, v, dk, dv, scale, rgs = std::move(rgs), p_off = std::move(p_off),
       probs = std::move(probs)](Node& self) {
        const auto& kt = kernels::active();
        auto* gq = parent_grad(self, 0);
        auto* gk = parent_grad(self, 1);
        auto* gv = parent_grad(self, 2);
        const auto qd = q.data(), kd = k.data(), vd = v.data();
        std::vector<double> ds;
        for (std::size_t i = 0; i < rgs.size(); ++i) {
          const auto& rg = rgs[i];
          const std::size_t len = rg.end - rg.begin;
          const double* p = probs.data() + p_off[i];
          const double* go = self.grad.data() + i * dv;
          ds.assign(len, 0.0);
          double pdp = 0.0;
          for (std::size_t j = 0; j < len; ++j) {
            ds[j] = kt.dot(go, vd.data() + (rg.begin + j) * dv, dv);
            pdp += p[j] * ds[j];
            if (gv) kt.axpy(p[j], go, gv->data() + (rg.begin + j) * dv, dv);
          }
          for (std::size_t j = 0; j < len; ++j) {
            const double g = scale * p[j] * (ds[j] - pdp);
            if (gq) kt.axpy(g, kd.data() + (rg.begin + j) * dk, gq->data() + i * dk, dk);
            if (gk) kt.axpy(g, qd.data() + i * dk, gk->data() + (rg.begin + j) * dk, dk);
          }
        }
      });
}

Tensor segment_max(const Tensor& x, const CsrPattern& groups) {
  if (x.rank() != 2 || x.rows() != groups.n_cols) {
    throw DimensionError("segment_max: groups over " + std::to_string(groups.n_cols) +
                         " rows, x is " + shape_string(x.shape()));
  }
  const std::size_t n = x.cols();
  const auto xd = x.data();
  std::vector<double> out(groups.n_rows * n, 0.0);
  std::vector<std::size_t> arg(groups.n_rows * n, 0);
  for (std::size_t g = 0; g < groups.n_rows; ++g) {
    if (groups.row_begin(g) == groups.row_end(g)) {
      throw DimensionError("segment_max: empty group " + std::to_string(g));
    }
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t best = groups.col_idx[groups.row_begin(g)];
      for (std::size_t e = groups.row_begin(g) + 1; e < groups.row_end(g); ++e) {
        const std::size_t r = groups.col_idx[e];
        if (xd[r * n + c] > xd[best * n + c]) best = r;
      }
      out[g * n + c] = xd[best * n + c];
      arg[g * n + c] = best;
    }
  }
  return detail::make_result({groups.n_rows, n}, std::move(out), {x},
                             [n, arg = std::move(arg)](Node& self) {
                               if (auto* gx = parent_grad(self, 0)) {
                                 for (std::size_t i = 0; i < arg.size(); ++i) {
                                   (*gx)[arg[i] * n + i % n] += self.grad[i];
                                 }
                               }
                             });
}

}  // namespace tidagcn
