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
//
// Independent oracles used by the tests. Everything here is coded straight
// from first principles (dense algebra, exhaustive search, 1-D numeric
// minimization) and never calls the implementation paths it checks.

#ifndef CONIC_TESTS_ORACLES_HPP_
#define CONIC_TESTS_ORACLES_HPP_

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "conic/solver.hpp"
#include "conic/stuffing.hpp"

namespace conic::oracles {

// SOC projection by candidate minimization: the input itself when feasible,
// the apex, or a numerically minimized point on the boundary ray.
std::vector<double> project_soc_numeric(double y, const std::vector<double>& x);

// Fill-in count of a symbolic Cholesky-style elimination of the pattern of s
// under the given order (number of strictly-lower entries of L that are not
// in the original pattern).
int fill_count(const conic::SparseMatrix& s, const std::vector<int>& order);

Eigen::MatrixXd to_dense(const conic::SparseMatrix& a);

// Dense LDL' without pivoting in natural order; throws on zero pivot.
void dense_ldl(const Eigen::MatrixXd& s, Eigen::MatrixXd* l, Eigen::VectorXd* d);

// Dense solve of (I + Q) x = w with Q assembled explicitly from the program
// data.
std::vector<double> dense_subspace_solve(const conic::ConeProgram& prog,
                                         const std::vector<double>& w);

// Direct dense transcription of the standard-form data for the beamforming
// family: builds (A, b, c) from the per-constraint blocks without any index
// maps or templates.
conic::ConeProgram dense_canonicalize(const conic::NetworkInstance& inst,
                                      conic::Field field);

}  // namespace conic::oracles

#endif  // CONIC_TESTS_ORACLES_HPP_
