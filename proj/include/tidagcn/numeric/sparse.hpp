#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tidagcn/numeric/tensor.hpp"

namespace tidagcn {

// Compressed-row sparsity pattern. Entries of row r occupy
// [row_ptr[r], row_ptr[r + 1]) in col_idx, in insertion order.
struct CsrPattern {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;

  std::size_t nnz() const { return col_idx.size(); }
  std::size_t row_begin(std::size_t r) const { return row_ptr[r]; }
  std::size_t row_end(std::size_t r) const { return row_ptr[r + 1]; }

  // Throws DimensionError/IndexError when row_ptr or col_idx are inconsistent.
  void validate() const;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Fixed-valued sparse matrix with rows sorted and unique (row, col) entries.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  // Sorts by (row, col). Throws IndexError for out-of-range entries and
  // DataError for duplicates.
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix identity(std::size_t n);

  std::size_t n_rows() const { return pattern_.n_rows; }
  std::size_t n_cols() const { return pattern_.n_cols; }
  std::size_t nnz() const { return values_.size(); }
  const CsrPattern& pattern() const { return pattern_; }
  std::span<const double> values() const { return values_; }
  std::vector<Triplet> entries() const;

  Tensor densify() const;

 private:
  CsrPattern pattern_;
  std::vector<double> values_;
};

// S * D with S fixed; gradient flows to D only.
Tensor sparse_dense_matmul(const SparseMatrix& s, const Tensor& d);

// Sparse-times-dense where the nonzero values are themselves a tracked
// tensor of length pattern.nnz(). out[r, :] = sum_e weights[e] * x[col_e, :]
// accumulated in entry order.
Tensor spmm(const CsrPattern& pattern, const Tensor& weights, const Tensor& x);

}  // namespace tidagcn
