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

#ifndef CONIC_NETOPT_HPP_
#define CONIC_NETOPT_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conic/stuffing.hpp"

namespace conic {

// Raised when an application-level step gets a solver status it cannot act
// on (Indeterminate or IterationLimit from a feasibility probe, for
// example).
class SolverStatusError : public std::runtime_error {
 public:
  SolverStatusError(SolveStatus status, const std::string& what)
      : std::runtime_error(what), status(status) {}
  SolveStatus status;
};

// Synthetic network model: nodes uniform i.i.d. in a square region, channels
// h_kl = 10^(-L(d_kl)/20) sqrt(phi s_kl) f_kl with log-normal shadowing and
// circularly-symmetric unit-variance fading. Generation is deterministic for
// a fixed seed. When normalize_noise is set, emitted instances use
// noise-relative units: sigma_k = 1 and channels divided by the physical
// noise standard deviation, which leaves SINRs, feasibility and beamformers
// unchanged while keeping the stuffed data well scaled.
struct ChannelModelConfig {
  double region_half_width_m = 1500.0;
  double pathloss_fixed_db = 128.1;  // L(d) = fixed + slope * log10(d / 1 km)
  double pathloss_slope_db = 37.6;
  double shadowing_std_db = 8.0;
  double antenna_gain = 1.0;
  bool rayleigh_fading = true;  // false freezes small-scale fading at 1
  double tx_power_budget_w = 1.0;
  double noise_power_w = 6.30957344480193e-14;  // -102 dBm
  double sinr_target_linear = 1.0;
  bool normalize_noise = true;
  std::uint64_t seed = 1;
};

double pathloss_db(const ChannelModelConfig& cfg, double distance_m);

NetworkInstance generate_network(const ChannelModelConfig& cfg,
                                 const NetworkShape& shape);

// Applications solve with equilibration on: stuffed channel coefficients
// spread over several orders of magnitude and the splitting iteration stalls
// on the raw scaling. Everything else follows the solver defaults.
SolverOptions default_app_options();

// Network power model: fronthaul link power per active RAU plus transmit
// power scaled by the amplifier efficiency.
struct PowerModelConfig {
  double fronthaul_link_power_w = 5.6;
  double amplifier_efficiency = 0.25;  // in (0, 1]
  void validate() const;
};

struct MinPowerResult {
  SolveStatus status = SolveStatus::kIterationLimit;
  SolveResult raw;
  std::optional<BeamformingSolution> solution;            // Optimal
  std::optional<CertificateReport> certificate_report;    // PrimalInfeasible
};

// Total transmit power minimization under per-user SINR targets and per-RAU
// budgets. Returns beamformers or a verified infeasibility certificate;
// any other terminal status raises SolverStatusError.
MinPowerResult min_power(const NetworkInstance& inst, TemplateCache& cache,
                         const SolverOptions& options = default_app_options());

struct SelectionProbe {
  int rau = -1;
  bool feasible = false;
};

struct GroupSparseResult {
  bool feasible = false;
  std::vector<int> active_raus;
  std::vector<SelectionProbe> probes;  // in probing order
  std::vector<double> stage1_group_norms;
  std::optional<BeamformingSolution> solution;
  std::optional<CertificateReport> certificate_report;
  double network_power_w = 0.0;
  double normalized_network_power = 0.0;
  double max_network_power_w = 0.0;  // all RAUs active, full power
};

// Two-stage network power minimization: a group-norm solve ranks RAUs, a
// greedy pass in ascending group-norm order switches RAUs off while the
// remaining set stays feasible, and the final transmit solve runs on the
// surviving set. Switched-off RAUs are encoded by zeroing their power
// budgets, which pins their beamformer blocks to zero without touching the
// template.
GroupSparseResult group_sparse_beamforming(
    const NetworkInstance& inst, const PowerModelConfig& power_cfg,
    TemplateCache& cache, const SolverOptions& options = default_app_options());

struct BisectionStep {
  double lo = 0.0;
  double hi = 0.0;
  double probe = 0.0;
  bool feasible = false;
};

struct MaxMinResult {
  double sinr = 0.0;  // largest feasible common target found
  double min_rate_bps_hz = 0.0;
  std::optional<BeamformingSolution> beamformers;
  std::vector<BisectionStep> trace;
};

// Bisection over a common SINR target; each probe checks feasibility of the
// power-minimization problem at that target. gamma_hi <= 0 selects the
// interference-free upper bound sum(P_l) * max_k ||h_k||^2 / min_k sigma_k^2.
MaxMinResult max_min_rate(const NetworkInstance& inst, TemplateCache& cache,
                          double tol, double gamma_hi = 0.0,
                          const SolverOptions& options = default_app_options());

enum class BaselineScheme { kZfbf, kRzf, kMrt };

std::string to_string(BaselineScheme scheme);

// Fixed-direction baselines with scalar power control: beamforming
// directions from zero-forcing, regularized zero-forcing or matched
// filtering, then the same bisection where each probe is a linear
// feasibility problem over per-user powers, stuffed with nonnegative cones
// and handed to the same solver.
MaxMinResult baseline_max_min(const NetworkInstance& inst,
                              BaselineScheme scheme, double tol,
                              double gamma_hi = 0.0,
                              const SolverOptions& options = default_app_options());

// sum over active RAUs of (fronthaul power + transmit power / efficiency).
double network_power_w(const PowerModelConfig& cfg,
                       const std::vector<bool>& active,
                       const std::vector<double>& rau_transmit_power_w);

}  // namespace conic

#endif  // CONIC_NETOPT_HPP_
