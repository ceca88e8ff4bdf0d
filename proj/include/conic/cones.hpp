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

#ifndef CONIC_CONES_HPP_
#define CONIC_CONES_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace conic {

enum class ConeKind {
  kZero,         // {0}^d
  kNonNegative,  // R_+^d
  kSecondOrder,  // {(y, x) : ||x||_2 <= y}, dim 1 degenerates to R_+
};

struct ConeBlock {
  ConeKind kind;
  int dim;
};

// Ordered description of a Cartesian product cone. Block order is the vector
// layout; no internal reordering ever happens.
class ConeSpec {
 public:
  ConeSpec() = default;
  explicit ConeSpec(std::vector<ConeBlock> blocks);

  int dim() const { return total_dim_; }
  std::span<const ConeBlock> blocks() const { return blocks_; }
  bool empty() const { return blocks_.empty(); }

  // Text encoding "z:<r> l:<p> q:<d1>,<d2>,..." with zero-dim entries
  // omitted. Only specs in canonical kind order (all Zero, then all
  // NonNegative, then SecondOrder blocks) can be encoded; parsing always
  // yields that order.
  std::string to_line() const;
  static ConeSpec parse_line(const std::string& line);

  bool operator==(const ConeSpec& other) const;

 private:
  std::vector<ConeBlock> blocks_;
  int total_dim_ = 0;
};

// A point laid out in ConeSpec block order.
struct ConePoint {
  std::vector<double> values;
};

// out[i] = max(v[i], 0)
void project_nonneg(std::span<const double> v, std::span<double> out);

// Euclidean projection of (y, x) onto the second-order cone of dimension
// 1 + x.size(). Three closed-form cases: zero if ||x|| <= -y, identity if
// ||x|| <= y, boundary scaling otherwise.
std::pair<double, std::vector<double>> project_soc(double y,
                                                   std::span<const double> x);

// Block-wise projection onto the cone described by spec.
void project_cone(const ConeSpec& spec, std::span<const double> v,
                  std::span<double> out);
std::vector<double> project_cone(const ConeSpec& spec,
                                 std::span<const double> v);

// Block-wise projection onto the dual cone: dual of Zero is the free space
// (identity), NonNegative and SecondOrder are self-dual.
void project_dual_cone(const ConeSpec& spec, std::span<const double> v,
                       std::span<double> out);
std::vector<double> project_dual_cone(const ConeSpec& spec,
                                      std::span<const double> v);

// ||v - project_cone(v)||_2
double cone_distance(const ConeSpec& spec, std::span<const double> v);
double dual_cone_distance(const ConeSpec& spec, std::span<const double> v);

}  // namespace conic

#endif  // CONIC_CONES_HPP_
