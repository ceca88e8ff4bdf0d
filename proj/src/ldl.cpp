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

#include "conic/ldl.hpp"

#include <cmath>
#include <stdexcept>

namespace conic {

int KktFactorization::positive_pivots() const {
  int c = 0;
  for (double v : d) c += v > 0.0 ? 1 : 0;
  return c;
}

int KktFactorization::negative_pivots() const {
  int c = 0;
  for (double v : d) c += v < 0.0 ? 1 : 0;
  return c;
}

void KktFactorization::solve(std::span<const double> rhs,
                             std::span<double> x) const {
  if (static_cast<int>(rhs.size()) != dim || static_cast<int>(x.size()) != dim)
    throw std::invalid_argument("ldl solve dimension mismatch");
  std::vector<double> w(dim);
  for (int k = 0; k < dim; ++k) w[k] = rhs[perm[k]];
  // L w' = w  (forward substitution, unit diagonal)
  for (int k = 0; k < dim; ++k) {
    const double wk = w[k];
    if (wk != 0.0) {
      for (int p = l_col_ptr[k]; p < l_col_ptr[k + 1]; ++p)
        w[l_row_idx[p]] -= l_values[p] * wk;
    }
  }
  for (int k = 0; k < dim; ++k) w[k] /= d[k];
  // L' w'' = w'  (backward substitution)
  for (int k = dim - 1; k >= 0; --k) {
    double wk = w[k];
    for (int p = l_col_ptr[k]; p < l_col_ptr[k + 1]; ++p)
      wk -= l_values[p] * w[l_row_idx[p]];
    w[k] = wk;
  }
  for (int k = 0; k < dim; ++k) x[perm[k]] = w[k];
}

std::vector<double> KktFactorization::solve_copy(
    std::span<const double> rhs) const {
  std::vector<double> x(dim);
  solve(rhs, x);
  return x;
}

SparseMatrix build_kkt(const SparseMatrix& a) {
  const int n = a.cols();
  const int m = a.rows();
  const int d = n + m;
  const SparseMatrix at = a.transposed();

  std::vector<int> col_ptr(d + 1, 0);
  std::vector<int> row_idx;
  std::vector<int> sizes(d, 0);
  for (int j = 0; j < n; ++j)
    sizes[j] = 1 + (a.col_ptr()[j + 1] - a.col_ptr()[j]);
  for (int i = 0; i < m; ++i)
    sizes[n + i] = (at.col_ptr()[i + 1] - at.col_ptr()[i]) + 1;
  for (int j = 0; j < d; ++j) col_ptr[j + 1] = col_ptr[j] + sizes[j];
  row_idx.resize(col_ptr[d]);
  std::vector<double> values(col_ptr[d]);

  // Columns 0..n-1: identity diagonal then -A rows shifted by n.
  for (int j = 0; j < n; ++j) {
    int pos = col_ptr[j];
    row_idx[pos] = j;
    values[pos] = 1.0;
    ++pos;
    for (int p = a.col_ptr()[j]; p < a.col_ptr()[j + 1]; ++p, ++pos) {
      row_idx[pos] = n + a.row_idx()[p];
      values[pos] = -a.values()[p];
    }
  }
  // Columns n..n+m-1: -A' on top, -1 on the diagonal.
  for (int i = 0; i < m; ++i) {
    int pos = col_ptr[n + i];
    for (int p = at.col_ptr()[i]; p < at.col_ptr()[i + 1]; ++p, ++pos) {
      row_idx[pos] = at.row_idx()[p];
      values[pos] = -at.values()[p];
    }
    row_idx[pos] = n + i;
    values[pos] = -1.0;
  }
  return SparseMatrix(d, d, std::move(col_ptr), std::move(row_idx),
                      std::move(values));
}

namespace {

// Upper-triangular part of P' S P in CSC, with P given as an elimination
// order. Each stored entry (i, j) of the full symmetric S maps to permuted
// coordinates; the one of each symmetric pair landing in the upper triangle
// is kept, so diagonals appear once.
SparseMatrix permuted_upper(const SparseMatrix& s, std::span<const int> perm,
                            std::span<const int> perm_inv) {
  std::vector<Triplet> trips;
  trips.reserve(s.nnz());
  for (int j = 0; j < s.cols(); ++j) {
    const int pj = perm_inv[j];
    for (int p = s.col_ptr()[j]; p < s.col_ptr()[j + 1]; ++p) {
      const int pi = perm_inv[s.row_idx()[p]];
      if (pi <= pj) trips.push_back({pi, pj, s.values()[p]});
    }
  }
  (void)perm;
  return SparseMatrix::from_triplets(s.cols(), s.cols(), trips);
}

}  // namespace

KktFactorization ldl_factor(const SparseMatrix& s, std::span<const int> perm) {
  if (s.rows() != s.cols())
    throw std::invalid_argument("ldl_factor requires a square matrix");
  const int n = s.cols();
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permutation length mismatch");

  KktFactorization f;
  f.dim = n;
  f.perm.assign(perm.begin(), perm.end());
  f.perm_inv.assign(n, -1);
  for (int k = 0; k < n; ++k) {
    const int p = f.perm[k];
    if (p < 0 || p >= n || f.perm_inv[p] != -1)
      throw std::invalid_argument("perm is not a permutation");
    f.perm_inv[p] = k;
  }

  const SparseMatrix c = permuted_upper(s, f.perm, f.perm_inv);
  const auto& cp = c.col_ptr();
  const auto& ci = c.row_idx();
  const auto& cx = c.values();

  // Symbolic pass: elimination tree and column counts of L.
  std::vector<int> parent(n, -1);
  std::vector<int> flag(n, -1);
  std::vector<int> lnz(n, 0);
  for (int k = 0; k < n; ++k) {
    flag[k] = k;
    for (int p = cp[k]; p < cp[k + 1]; ++p) {
      int i = ci[p];
      if (i >= k) continue;
      for (; flag[i] != k; i = parent[i]) {
        if (parent[i] == -1) parent[i] = k;
        ++lnz[i];
        flag[i] = k;
      }
    }
  }
  f.l_col_ptr.assign(n + 1, 0);
  for (int k = 0; k < n; ++k) f.l_col_ptr[k + 1] = f.l_col_ptr[k] + lnz[k];
  f.l_row_idx.assign(f.l_col_ptr[n], 0);
  f.l_values.assign(f.l_col_ptr[n], 0.0);
  f.d.assign(n, 0.0);

  // Numeric pass, up-looking: row k of L from a sparse triangular solve.
  std::vector<double> y(n, 0.0);
  std::vector<int> pattern(n);
  std::vector<int> fill(n, 0);  // entries placed in each column of L so far
  std::fill(flag.begin(), flag.end(), -1);
  for (int k = 0; k < n; ++k) {
    int top = n;
    flag[k] = k;
    for (int p = cp[k]; p < cp[k + 1]; ++p) {
      const int i0 = ci[p];
      if (i0 > k)
        throw FactorizationError("matrix is not symmetric in pattern");
      y[i0] += cx[p];
      int len = 0;
      for (int i = i0; flag[i] != k; i = parent[i]) {
        pattern[len++] = i;
        flag[i] = k;
      }
      while (len > 0) pattern[--top] = pattern[--len];
    }
    f.d[k] = y[k];
    y[k] = 0.0;
    for (int t = top; t < n; ++t) {
      const int i = pattern[t];
      const double yi = y[i];
      y[i] = 0.0;
      const int pend = f.l_col_ptr[i] + fill[i];
      for (int p = f.l_col_ptr[i]; p < pend; ++p)
        y[f.l_row_idx[p]] -= f.l_values[p] * yi;
      const double lki = yi / f.d[i];
      f.d[k] -= lki * yi;
      f.l_row_idx[pend] = k;
      f.l_values[pend] = lki;
      ++fill[i];
    }
    if (f.d[k] == 0.0 || !std::isfinite(f.d[k]))
      throw FactorizationError("zero or non-finite pivot at step " +
                               std::to_string(k));
  }
  return f;
}

std::vector<double> ldl_solve(const KktFactorization& f,
                              std::span<const double> rhs) {
  return f.solve_copy(rhs);
}

}  // namespace conic
