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

#include "conic/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conic {

SparseMatrix::SparseMatrix(int nrows, int ncols, std::vector<int> col_ptr,
                           std::vector<int> row_idx, std::vector<double> values)
    : nrows_(nrows),
      ncols_(ncols),
      col_ptr_(std::move(col_ptr)),
      row_idx_(std::move(row_idx)),
      values_(std::move(values)) {
  if (nrows_ < 0 || ncols_ < 0)
    throw std::invalid_argument("negative matrix dimension");
  if (static_cast<int>(col_ptr_.size()) != ncols_ + 1)
    throw std::invalid_argument("column pointer array has wrong length");
  if (col_ptr_.front() != 0 ||
      col_ptr_.back() != static_cast<int>(row_idx_.size()) ||
      row_idx_.size() != values_.size())
    throw std::invalid_argument("inconsistent CSC arrays");
  for (int j = 0; j < ncols_; ++j) {
    if (col_ptr_[j] > col_ptr_[j + 1])
      throw std::invalid_argument("column pointers must be non-decreasing");
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      if (row_idx_[p] < 0 || row_idx_[p] >= nrows_)
        throw std::invalid_argument("row index out of range");
      if (p > col_ptr_[j] && row_idx_[p] <= row_idx_[p - 1])
        throw std::invalid_argument("row indices must be strictly increasing per column");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(int nrows, int ncols,
                                         std::span<const Triplet> triplets) {
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
      throw std::invalid_argument("triplet index out of range");
  }
  std::vector<Triplet> sorted(triplets.begin(), triplets.end());
  std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });

  std::vector<int> col_ptr(ncols + 1, 0);
  std::vector<int> row_idx;
  std::vector<double> values;
  row_idx.reserve(sorted.size());
  values.reserve(sorted.size());

  std::size_t i = 0;
  for (int j = 0; j < ncols; ++j) {
    while (i < sorted.size() && sorted[i].col == j) {
      const int r = sorted[i].row;
      double v = 0.0;
      while (i < sorted.size() && sorted[i].col == j && sorted[i].row == r) {
        v += sorted[i].value;
        ++i;
      }
      if (v != 0.0) {
        row_idx.push_back(r);
        values.push_back(v);
      }
    }
    col_ptr[j + 1] = static_cast<int>(row_idx.size());
  }
  return SparseMatrix(nrows, ncols, std::move(col_ptr), std::move(row_idx),
                      std::move(values));
}

void SparseMatrix::multiply(std::span<const double> x,
                            std::span<double> y) const {
  for (double& v : y) v = 0.0;
  multiply_add(x, y);
}

void SparseMatrix::multiply_add(std::span<const double> x,
                                std::span<double> y) const {
  if (static_cast<int>(x.size()) != ncols_ || static_cast<int>(y.size()) != nrows_)
    throw std::invalid_argument("matvec dimension mismatch");
  for (int j = 0; j < ncols_; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
      y[row_idx_[p]] += values_[p] * xj;
  }
}

void SparseMatrix::multiply_transpose(std::span<const double> x,
                                      std::span<double> y) const {
  for (double& v : y) v = 0.0;
  multiply_transpose_add(x, y);
}

void SparseMatrix::multiply_transpose_add(std::span<const double> x,
                                          std::span<double> y) const {
  if (static_cast<int>(x.size()) != nrows_ || static_cast<int>(y.size()) != ncols_)
    throw std::invalid_argument("matvec dimension mismatch");
  for (int j = 0; j < ncols_; ++j) {
    double s = 0.0;
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
      s += values_[p] * x[row_idx_[p]];
    y[j] += s;
  }
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<int> count(nrows_ + 1, 0);
  for (int r : row_idx_) ++count[r + 1];
  for (int i = 0; i < nrows_; ++i) count[i + 1] += count[i];
  std::vector<int> col_ptr = count;  // count[r] = next insert position of row r
  std::vector<int> row_idx(values_.size());
  std::vector<double> values(values_.size());
  for (int j = 0; j < ncols_; ++j) {
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      const int pos = count[row_idx_[p]]++;
      row_idx[pos] = j;
      values[pos] = values_[p];
    }
  }
  return SparseMatrix(ncols_, nrows_, std::move(col_ptr), std::move(row_idx),
                      std::move(values));
}

double SparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

bool SparseMatrix::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void SparseMatrix::scale_rows_cols(std::span<const double> row_scale,
                                   std::span<const double> col_scale) {
  if (static_cast<int>(row_scale.size()) != nrows_ ||
      static_cast<int>(col_scale.size()) != ncols_)
    throw std::invalid_argument("scaling vector dimension mismatch");
  for (int j = 0; j < ncols_; ++j) {
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
      values_[p] *= row_scale[row_idx_[p]] * col_scale[j];
  }
}

double SparseMatrix::coeff(int row, int col) const {
  const auto begin = row_idx_.begin() + col_ptr_[col];
  const auto end = row_idx_.begin() + col_ptr_[col + 1];
  const auto it = std::lower_bound(begin, end, row);
  if (it == end || *it != row) return 0.0;
  return values_[static_cast<std::size_t>(it - row_idx_.begin())];
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return nrows_ == other.nrows_ && ncols_ == other.ncols_ &&
         col_ptr_ == other.col_ptr_ && row_idx_ == other.row_idx_;
}

}  // namespace conic
