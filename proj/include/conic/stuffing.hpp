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

#ifndef CONIC_STUFFING_HPP_
#define CONIC_STUFFING_HPP_

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "conic/solver.hpp"

namespace conic {

enum class Field { kReal, kComplex };
enum class StuffObjective { kTotalNorm, kGroupNorm };

struct NetworkShape {
  int num_rau = 0;   // L
  int num_user = 0;  // K
  std::vector<int> antennas;  // N_l per RAU
  StuffObjective objective = StuffObjective::kTotalNorm;

  int total_antennas() const;  // N
  int antenna_offset(int rau) const;
  void validate() const;
  bool operator==(const NetworkShape& other) const;
};

// One problem instance over a shape: aggregate downlink channels h_k in C^N
// (RAU-major), per-RAU power budgets, per-user noise standard deviations and
// linear SINR targets. Group weights apply to the GroupNorm objective and
// default to 1 when empty.
struct NetworkInstance {
  NetworkShape shape;
  std::vector<std::vector<std::complex<double>>> channels;  // [k][0..N)
  std::vector<double> power_budget_w;  // P_l
  std::vector<double> noise_std;       // sigma_k
  std::vector<double> sinr_target;     // gamma_k, linear scale
  std::vector<double> group_weights;   // omega_l, optional

  void validate(bool allow_zero_power = false) const;
};

// Real lift of a complex vector: the two columns of
// [[Re(h), -Im(h)], [Im(h), Re(h)]], so that with v lifted as
// (Re(v), Im(v)) the dot products give Re(h^H v) and Im(h^H v).
struct ComplexLift {
  std::vector<double> real_part_row;  // (Re(h), Im(h))
  std::vector<double> imag_part_row;  // (-Im(h), Re(h))
};
ComplexLift complex_to_real(std::span<const std::complex<double>> h);

// Pre-generated standard-form skeleton for one network shape. The sparsity
// pattern and all structural +-1 entries are fixed; per-instance parameters
// land at index-mapped slots:
//   b slots:  sqrt(P_l) at the power-budget rows, sigma_k closing each QoS
//             block;
//   A slots:  -beta_k-scaled channel row entries (beta_k = sqrt(1 + 1/gamma_k))
//             in the per-user SINR rows, channel block entries in the QoS
//             cones;
//   c slots:  omega_l group weights (GroupNorm only).
//
// Variable layout of nu: [epigraph scalars | y0 per RAU | t0 per user | v],
// where v holds the user-major beamformer stack; under the complex field each
// user block is (Re(v_k), Im(v_k)). The GroupNorm objective replaces the
// single total-norm epigraph with one scalar and one second-order block per
// RAU group.
class StuffingTemplate {
 public:
  static StuffingTemplate build(const NetworkShape& shape, Field field);

  // Reassembles a persisted template; validates slot counts and bounds.
  static StuffingTemplate restore(NetworkShape shape, Field field,
                                  ConeProgram skeleton,
                                  std::vector<int> power_slots,
                                  std::vector<int> noise_slots,
                                  std::vector<int> weight_slots,
                                  std::vector<std::vector<int>> sinr_slots,
                                  std::vector<std::vector<int>> channel_slots);

  const NetworkShape& shape() const { return shape_; }
  Field field() const { return field_; }
  const ConeProgram& skeleton() const { return skeleton_; }
  int lift_factor() const { return field_ == Field::kComplex ? 2 : 1; }

  // Fresh cone program: memcpy of the skeleton plus parameter copy.
  ConeProgram stuff(const NetworkInstance& inst) const;
  // Parameter copy into an existing program of this pattern; never touches
  // the pattern arrays.
  void stuff_into(const NetworkInstance& inst, ConeProgram& prog) const;

  // Variable layout.
  int var_epigraph(int group) const;  // TotalNorm: group 0 only
  int var_y0(int rau) const;
  int var_t0(int user) const;
  int var_v_start() const;
  int v_dim() const;
  int user_block_dim() const;

  // Index maps (value-array positions for A, element positions for b and c).
  int power_slot(int rau) const;
  int noise_slot(int user) const;
  int weight_slot(int group) const;  // GroupNorm only
  std::span<const int> sinr_slots(int user) const;
  std::span<const int> channel_slots(int user) const;

 private:
  NetworkShape shape_;
  Field field_ = Field::kReal;
  ConeProgram skeleton_;
  std::vector<int> power_slots_;
  std::vector<int> noise_slots_;
  std::vector<int> weight_slots_;
  std::vector<std::vector<int>> sinr_slots_;
  std::vector<std::vector<int>> channel_slots_;
};

ConeProgram stuff(const StuffingTemplate& tmpl, const NetworkInstance& inst);

struct BeamformingSolution {
  // beamformers[l][k] in C^{N_l}
  std::vector<std::vector<std::vector<std::complex<double>>>> beamformers;
  std::vector<double> rau_power_w;    // sum_k ||v_lk||^2 per RAU
  std::vector<double> group_norms;    // || aggregate v_l ||_2 per RAU
  std::vector<double> achieved_sinr;  // Gamma_k, linear scale
  double total_transmit_power_w = 0.0;
  double cone_objective = 0.0;
};

// Evaluates per-RAU powers, group norms and achieved SINRs for explicit
// per-user beamforming vectors v_k in C^N.
BeamformingSolution evaluate_beamformers(
    const NetworkInstance& inst,
    const std::vector<std::vector<std::complex<double>>>& v_per_user);

// Extracts the beamformers from the tail of nu-hat, un-lifting complex
// pairs, and evaluates per-RAU powers and achieved SINRs. Requires an
// Optimal result.
BeamformingSolution recover_beamformers(const StuffingTemplate& tmpl,
                                        const NetworkInstance& inst,
                                        const SolveResult& result);

// Shared immutable templates keyed by (shape, field); pre-generation happens
// once per key.
class TemplateCache {
 public:
  std::shared_ptr<const StuffingTemplate> get(const NetworkShape& shape,
                                              Field field);

 private:
  std::map<std::string, std::shared_ptr<const StuffingTemplate>> cache_;
  std::mutex mutex_;
};

}  // namespace conic

#endif  // CONIC_STUFFING_HPP_
