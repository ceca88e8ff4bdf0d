// Copyright 2025 The conic-splitter Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONIC_SPARSE_HPP_
#define CONIC_SPARSE_HPP_

#include <span>
#include <vector>

namespace conic {

struct Triplet {
  int row;
  int col;
  double value;
};

// Compressed-sparse-column matrix. Row indices are strictly increasing within
// each column; construction from triplets sums duplicates and drops exact
// zeros so no explicit zeros are stored.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int nrows, int ncols, std::vector<int> col_ptr,
               std::vector<int> row_idx, std::vector<double> values);

  static SparseMatrix from_triplets(int nrows, int ncols,
                                    std::span<const Triplet> triplets);

  int rows() const { return nrows_; }
  int cols() const { return ncols_; }
  int nnz() const { return static_cast<int>(values_.size()); }

  const std::vector<int>& col_ptr() const { return col_ptr_; }
  const std::vector<int>& row_idx() const { return row_idx_; }
  const std::vector<double>& values() const { return values_; }
  // Value array for in-place overwrites that keep the pattern fixed.
  std::vector<double>& mutable_values() { return values_; }

  // y = A x and y += A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  void multiply_add(std::span<const double> x, std::span<double> y) const;
  // y = A' x and y += A' x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;
  void multiply_transpose_add(std::span<const double> x,
                              std::span<double> y) const;

  SparseMatrix transposed() const;

  double frobenius_norm() const;
  bool all_finite() const;

  // Scales A in place to diag(row_scale) * A * diag(col_scale).
  void scale_rows_cols(std::span<const double> row_scale,
                       std::span<const double> col_scale);

  double coeff(int row, int col) const;  // 0 if not stored; O(log nnz(col))

  bool same_pattern(const SparseMatrix& other) const;

 private:
  int nrows_ = 0;
  int ncols_ = 0;
  std::vector<int> col_ptr_;   // size ncols + 1
  std::vector<int> row_idx_;   // size nnz
  std::vector<double> values_; // size nnz
};

}  // namespace conic

#endif  // CONIC_SPARSE_HPP_
