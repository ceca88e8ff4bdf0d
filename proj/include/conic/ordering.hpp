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

#ifndef CONIC_ORDERING_HPP_
#define CONIC_ORDERING_HPP_

#include <vector>

#include "conic/sparse.hpp"

namespace conic {

// Fill-reducing ordering of a square matrix with symmetric pattern, computed
// by approximate minimum degree on the quotient graph (element absorption,
// Amestoy-Davis-Duff external-degree bound). Uses the pattern only; values
// are ignored. Ties break toward the lowest index, so the result is
// deterministic for a fixed pattern.
//
// Returns perm with perm[k] = original index eliminated at step k.
std::vector<int> symbolic_order(const SparseMatrix& s);

}  // namespace conic

#endif  // CONIC_ORDERING_HPP_
