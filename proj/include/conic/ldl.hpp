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

#ifndef CONIC_LDL_HPP_
#define CONIC_LDL_HPP_

#include <span>
#include <stdexcept>
#include <vector>

#include "conic/sparse.hpp"

namespace conic {

// Raised when a pivot is zero or non-finite, i.e. the input was not the
// quasidefinite matrix the static factorization requires.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// S = P L D L' P' with unit-lower-triangular L (strict part stored) and
// diagonal D of mixed sign. Factored once, solved many times; solve is
// read-only and safe to call concurrently.
struct KktFactorization {
  int dim = 0;
  std::vector<int> perm;      // perm[k] = original index of the k-th pivot
  std::vector<int> perm_inv;
  std::vector<int> l_col_ptr;
  std::vector<int> l_row_idx;
  std::vector<double> l_values;
  std::vector<double> d;

  int positive_pivots() const;
  int negative_pivots() const;

  // x = S^{-1} rhs via permute / forward / diagonal / backward / unpermute.
  void solve(std::span<const double> rhs, std::span<double> x) const;
  std::vector<double> solve_copy(std::span<const double> rhs) const;
};

// S = [[I, -A'], [-A, -I]], the symmetric quasidefinite system behind the
// ADMM subspace projection.
SparseMatrix build_kkt(const SparseMatrix& a);

// Numeric factorization in the given elimination order; no pivoting.
KktFactorization ldl_factor(const SparseMatrix& s, std::span<const int> perm);

// Convenience wrapper matching the factor-once / solve-many usage.
std::vector<double> ldl_solve(const KktFactorization& f,
                              std::span<const double> rhs);

}  // namespace conic

#endif  // CONIC_LDL_HPP_
