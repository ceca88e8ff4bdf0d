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

#ifndef CONIC_IO_HPP_
#define CONIC_IO_HPP_

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "conic/solver.hpp"
#include "conic/stuffing.hpp"

namespace conic {

// Parse failure with the 1-based source position of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line;
  int column;
};

// Cone-program text format:
//   n: <int>
//   m: <int>
//   cones: z:<r> l:<p> q:<d1>,<d2>,...
//   c: <n reals>
//   b: <m reals>
//   %%MatrixMarket matrix coordinate real general
//   <m> <n> <nnz>
//   <row> <col> <value>     (one-based indices)
void write_cone_program(std::ostream& os, const ConeProgram& prog);
void write_cone_program_file(const std::string& path, const ConeProgram& prog);
ConeProgram read_cone_program(std::istream& is);
ConeProgram read_cone_program_file(const std::string& path);

// Matrix Market coordinate blocks (one-based), as embedded in the program
// format.
void write_matrix_market(std::ostream& os, const SparseMatrix& a);
SparseMatrix read_matrix_market(std::istream& is, int* line_counter);

// Result JSON: {status, objective, residuals{primal,dual,gap}, iterations,
// time_ms, nu[], eta[], mu[]} with certificate[] replacing the solution
// vectors on infeasible statuses.
std::string result_to_json(const SolveResult& result);

// Instance JSON: {L, K, N[], P[], sigma[], gamma[], omega[]?, channels:
// [[[re,im],...],...], objective?}.
std::string instance_to_json(const NetworkInstance& inst);
NetworkInstance instance_from_json(const std::string& text);
NetworkInstance read_instance_file(const std::string& path);
void write_instance_file(const std::string& path, const NetworkInstance& inst);

// Template persistence: the skeleton in the cone-program format next to a
// versioned JSON sidecar holding the shape, field and index maps.
void save_template(const std::string& program_path,
                   const std::string& sidecar_path,
                   const StuffingTemplate& tmpl);
StuffingTemplate load_template(const std::string& program_path,
                               const std::string& sidecar_path);

}  // namespace conic

#endif  // CONIC_IO_HPP_
