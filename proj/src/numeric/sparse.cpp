#include "tidagcn/numeric/sparse.hpp"

#include <algorithm>
#include <string>

#include "op_util.hpp"
#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/kernels.hpp"

namespace tidagcn {

void CsrPattern::validate() const {
  if (row_ptr.size() != n_rows + 1 || row_ptr.front() != 0 || row_ptr.back() != col_idx.size()) {
    throw DimensionError("csr pattern: row_ptr inconsistent with " + std::to_string(n_rows) +
                         " rows and " + std::to_string(col_idx.size()) + " entries");
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (row_ptr[r] > row_ptr[r + 1]) throw DimensionError("csr pattern: row_ptr not monotone");
  }
  for (std::size_t c : col_idx) {
    if (c >= n_cols) {
      throw IndexError("csr pattern: column " + std::to_string(c) + " out of " +
                       std::to_string(n_cols));
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                         std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= n_rows || t.col >= n_cols) {
      throw IndexError("sparse entry (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                       ") outside " + std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col) {
      throw DataError("duplicate sparse entry (" + std::to_string(entries[i].row) + ", " +
                      std::to_string(entries[i].col) + ")");
    }
  }
  SparseMatrix s;
  s.pattern_.n_rows = n_rows;
  s.pattern_.n_cols = n_cols;
  s.pattern_.row_ptr.assign(n_rows + 1, 0);
  s.pattern_.col_idx.reserve(entries.size());
  s.values_.reserve(entries.size());
  for (const auto& t : entries) {
    ++s.pattern_.row_ptr[t.row + 1];
    s.pattern_.col_idx.push_back(t.col);
    s.values_.push_back(t.value);
  }
  for (std::size_t r = 0; r < n_rows; ++r) s.pattern_.row_ptr[r + 1] += s.pattern_.row_ptr[r];
  return s;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> e;
  e.reserve(n);
  for (std::size_t i = 0; i < n; ++i) e.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(e));
}

std::vector<Triplet> SparseMatrix::entries() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < n_rows(); ++r) {
    for (std::size_t e = pattern_.row_begin(r); e < pattern_.row_end(r); ++e) {
      out.push_back({r, pattern_.col_idx[e], values_[e]});
    }
  }
  return out;
}

Tensor SparseMatrix::densify() const {
  std::vector<double> dense(n_rows() * n_cols(), 0.0);
  for (const auto& t : entries()) dense[t.row * n_cols() + t.col] = t.value;
  return Tensor::from({n_rows(), n_cols()}, std::move(dense));
}

Tensor sparse_dense_matmul(const SparseMatrix& s, const Tensor& d) {
  return spmm(s.pattern(), Tensor::from({s.nnz()}, {s.values().begin(), s.values().end()}), d);
}

Tensor spmm(const CsrPattern& pattern, const Tensor& weights, const Tensor& x) {
  if (x.rank() != 2) {
    throw DimensionError("spmm: dense operand must be a matrix, got " + shape_string(x.shape()));
  }
  if (x.rows() != pattern.n_cols) {
    throw DimensionError("spmm: sparse " + std::to_string(pattern.n_rows) + "x" +
                         std::to_string(pattern.n_cols) + " times dense " +
                         shape_string(x.shape()));
  }
  if (weights.size() != pattern.nnz()) {
    throw DimensionError("spmm: " + std::to_string(weights.size()) + " weights for " +
                         std::to_string(pattern.nnz()) + " entries");
  }
  const std::size_t n = x.cols();
  const auto& kt = kernels::active();
  const auto xd = x.data(), wd = weights.data();
  std::vector<double> out(pattern.n_rows * n, 0.0);
  for (std::size_t r = 0; r < pattern.n_rows; ++r) {
    for (std::size_t e = pattern.row_begin(r); e < pattern.row_end(r); ++e) {
      kt.axpy(wd[e], xd.data() + pattern.col_idx[e] * n, out.data() + r * n, n);
    }
  }
  // The pattern is copied so the closure outlives the caller's pattern.
  return detail::make_result(
      {pattern.n_rows, n}, std::move(out), {weights, x},
      [pattern, weights, x, n](detail::Node& self) {
        const auto& kt = kernels::active();
        auto* gw = detail::parent_grad(self, 0);
        auto* gx = detail::parent_grad(self, 1);
        const auto xd = x.data(), wd = weights.data();
        for (std::size_t r = 0; r < pattern.n_rows; ++r) {
          const double* gy = self.grad.data() + r * n;
          for (std::size_t e = pattern.row_begin(r); e < pattern.row_end(r); ++e) {
            const std::size_t c = pattern.col_idx[e];
            if (gw) (*gw)[e] += kt.dot(gy, xd.data() + c * n, n);
            if (gx) kt.axpy(wd[e], gy, gx->data() + c * n, n);
          }
        }
      });
}

}  // namespace tidagcn
