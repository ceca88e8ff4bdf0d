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

#include "conic/netopt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace conic {

namespace {

// Probes feasibility of the power-minimization problem for a prepared
// instance, warm-starting from the previous feasible probe when available.
struct FeasibilityProbe {
  bool feasible = false;
  SolveResult result;
};

// Probes run with a raised iteration cap. Near the feasibility boundary the
// embedding converges slowly in both directions; a probe that hits the cap
// is retried once on an over-relaxed trajectory with a larger budget, and
// one that still stalls counts as infeasible, which only ever keeps more
// RAUs on or lowers the reported common SINR. Indeterminate aborts.
SolverOptions probe_options(const SolverOptions& options) {
  SolverOptions probe = options;
  probe.max_iters = std::max(options.max_iters, 50000);
  return probe;
}

SolveResult solve_probe(const ConeProgram& prog, const SolverOptions& options,
                        const WarmStart* warm) {
  const SolverOptions first = probe_options(options);
  SolveResult res = solve(prog, first, warm);
  if (res.status == SolveStatus::kIterationLimit) {
    SolverOptions retry = first;
    retry.over_relax = !first.over_relax;
    retry.max_iters = std::max(4 * first.max_iters, 200000);
    res = solve(prog, retry, warm);
  }
  return res;
}

FeasibilityProbe probe_feasibility(const StuffingTemplate& tmpl,
                                   const NetworkInstance& inst,
                                   ConeProgram& scratch,
                                   const SolverOptions& options,
                                   const WarmStart* warm) {
  tmpl.stuff_into(inst, scratch);
  const SolveResult res = solve_probe(scratch, options, warm);
  FeasibilityProbe probe;
  probe.result = res;
  switch (res.status) {
    case SolveStatus::kOptimal:
      probe.feasible = true;
      break;
    case SolveStatus::kPrimalInfeasible:
    case SolveStatus::kIterationLimit:
      probe.feasible = false;
      break;
    default:
      throw SolverStatusError(res.status,
                              "feasibility probe ended with status " +
                                  to_string(res.status));
  }
  return probe;
}

NetworkShape with_objective(const NetworkShape& shape, StuffObjective obj) {
  NetworkShape s = shape;
  s.objective = obj;
  return s;
}

// Application solves always run through the complex lift; the real field is
// a reduced variant used for oracles and tests.
constexpr Field kAppField = Field::kComplex;

double default_gamma_hi(const NetworkInstance& inst) {
  double total_power = 0.0;
  for (double p : inst.power_budget_w) total_power += p;
  double max_h2 = 0.0;
  for (const auto& h : inst.channels) {
    double h2 = 0.0;
    for (const auto& v : h) h2 += std::norm(v);
    max_h2 = std::max(max_h2, h2);
  }
  double min_sigma2 = std::numeric_limits<double>::infinity();
  for (double s : inst.noise_std) min_sigma2 = std::min(min_sigma2, s * s);
  return total_power * max_h2 / min_sigma2;
}

}  // namespace

SolverOptions default_app_options() {
  SolverOptions options;
  options.equilibrate = true;
  return options;
}

double pathloss_db(const ChannelModelConfig& cfg, double distance_m) {
  return cfg.pathloss_fixed_db +
         cfg.pathloss_slope_db * std::log10(distance_m / 1000.0);
}

NetworkInstance generate_network(const ChannelModelConfig& cfg,
                                 const NetworkShape& shape) {
  shape.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(-cfg.region_half_width_m,
                                             cfg.region_half_width_m);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int num_rau = shape.num_rau;
  const int num_user = shape.num_user;
  std::vector<std::pair<double, double>> rau(num_rau), user(num_user);
  for (auto& p : rau) {
    p.first = uni(rng);
    p.second = uni(rng);
  }
  for (auto& p : user) {
    p.first = uni(rng);
    p.second = uni(rng);
  }

  const double sigma_phys = std::sqrt(cfg.noise_power_w);
  NetworkInstance inst;
  inst.shape = shape;
  inst.channels.assign(num_user, {});
  for (int k = 0; k < num_user; ++k) {
    inst.channels[k].reserve(shape.total_antennas());
    for (int l = 0; l < num_rau; ++l) {
      const double dx = user[k].first - rau[l].first;
      const double dy = user[k].second - rau[l].second;
      const double d = std::max(1.0, std::hypot(dx, dy));
      const double loss_db = pathloss_db(cfg, d);
      double shadow = 1.0;
      if (cfg.shadowing_std_db > 0.0)
        shadow = std::pow(10.0, cfg.shadowing_std_db * gauss(rng) / 10.0);
      const double amp =
          std::pow(10.0, -loss_db / 20.0) * std::sqrt(cfg.antenna_gain * shadow);
      for (int j = 0; j < shape.antennas[l]; ++j) {
        std::complex<double> fading(1.0, 0.0);
        if (cfg.rayleigh_fading) {
          fading = std::complex<double>(gauss(rng), gauss(rng)) / std::sqrt(2.0);
        }
        std::complex<double> h = amp * fading;
        if (cfg.normalize_noise) h /= sigma_phys;
        inst.channels[k].push_back(h);
      }
    }
  }
  inst.power_budget_w.assign(num_rau, cfg.tx_power_budget_w);
  inst.noise_std.assign(num_user,
                        cfg.normalize_noise ? 1.0 : sigma_phys);
  inst.sinr_target.assign(num_user, cfg.sinr_target_linear);
  inst.validate();
  return inst;
}

void PowerModelConfig::validate() const {
  if (!(amplifier_efficiency > 0.0 && amplifier_efficiency <= 1.0))
    throw std::invalid_argument("amplifier efficiency must be in (0, 1]");
  if (fronthaul_link_power_w < 0.0)
    throw std::invalid_argument("fronthaul power must be nonnegative");
}

MinPowerResult min_power(const NetworkInstance& inst, TemplateCache& cache,
                         const SolverOptions& options) {
  inst.validate(/*allow_zero_power=*/true);
  const NetworkShape shape =
      with_objective(inst.shape, StuffObjective::kTotalNorm);
  const Field field = kAppField;
  auto tmpl = cache.get(shape, field);
  NetworkInstance probe_inst = inst;
  probe_inst.shape = shape;
  const ConeProgram prog = tmpl->stuff(probe_inst);
  MinPowerResult out;
  out.raw = solve(prog, options);
  out.status = out.raw.status;
  switch (out.status) {
    case SolveStatus::kOptimal:
      out.solution = recover_beamformers(*tmpl, probe_inst, out.raw);
      break;
    case SolveStatus::kPrimalInfeasible:
      out.certificate_report = verify_certificate(prog, out.raw);
      break;
    default:
      throw SolverStatusError(out.status, "min_power ended with status " +
                                              to_string(out.status));
  }
  return out;
}

GroupSparseResult group_sparse_beamforming(const NetworkInstance& inst,
                                           const PowerModelConfig& power_cfg,
                                           TemplateCache& cache,
                                           const SolverOptions& options) {
  inst.validate();
  power_cfg.validate();
  GroupSparseResult out;
  const Field field = kAppField;

  // Stage 1: group-sparsity inducing solve.
  const NetworkShape group_shape =
      with_objective(inst.shape, StuffObjective::kGroupNorm);
  auto group_tmpl = cache.get(group_shape, field);
  NetworkInstance group_inst = inst;
  group_inst.shape = group_shape;
  const ConeProgram group_prog = group_tmpl->stuff(group_inst);
  const SolveResult stage1 = solve(group_prog, options);
  if (stage1.status == SolveStatus::kPrimalInfeasible) {
    out.feasible = false;
    out.certificate_report = verify_certificate(group_prog, stage1);
    return out;
  }
  if (stage1.status != SolveStatus::kOptimal)
    throw SolverStatusError(stage1.status, "group-norm stage ended with status " +
                                               to_string(stage1.status));
  const BeamformingSolution stage1_sol =
      recover_beamformers(*group_tmpl, group_inst, stage1);
  out.stage1_group_norms = stage1_sol.group_norms;

  // Stage 2: greedy switch-off in ascending group-norm order (ties by index).
  const int num_rau = inst.shape.num_rau;
  std::vector<int> order(num_rau);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return stage1_sol.group_norms[a] < stage1_sol.group_norms[b];
  });

  const NetworkShape total_shape =
      with_objective(inst.shape, StuffObjective::kTotalNorm);
  auto tmpl = cache.get(total_shape, field);
  NetworkInstance reduced = inst;
  reduced.shape = total_shape;
  std::vector<bool> active(num_rau, true);
  ConeProgram scratch = tmpl->skeleton();
  WarmStart warm;
  bool have_warm = false;
  for (int l : order) {
    reduced.power_budget_w[l] = 0.0;  // tentatively off
    FeasibilityProbe probe = probe_feasibility(
        *tmpl, reduced, scratch, options,
        have_warm && options.warm_start_probes ? &warm : nullptr);
    out.probes.push_back({l, probe.feasible});
    if (probe.feasible) {
      active[l] = false;
      warm.nu = probe.result.nu;
      warm.eta = probe.result.eta;
      warm.mu = probe.result.mu;
      have_warm = true;
    } else {
      reduced.power_budget_w[l] = inst.power_budget_w[l];  // back on
    }
  }

  // Final transmit solve on the surviving active set.
  const ConeProgram final_prog = tmpl->stuff(reduced);
  const SolveResult final_res =
      solve(final_prog, options, have_warm ? &warm : nullptr);
  if (final_res.status != SolveStatus::kOptimal)
    throw SolverStatusError(final_res.status,
                            "active-set solve ended with status " +
                                to_string(final_res.status));
  out.feasible = true;
  out.solution = recover_beamformers(*tmpl, reduced, final_res);
  for (int l = 0; l < num_rau; ++l)
    if (active[l]) out.active_raus.push_back(l);
  out.network_power_w =
      network_power_w(power_cfg, active, out.solution->rau_power_w);
  std::vector<bool> all_active(num_rau, true);
  std::vector<double> full_power = inst.power_budget_w;
  out.max_network_power_w = network_power_w(power_cfg, all_active, full_power);
  out.normalized_network_power = out.network_power_w / out.max_network_power_w;
  return out;
}

MaxMinResult max_min_rate(const NetworkInstance& inst, TemplateCache& cache,
                          double tol, double gamma_hi,
                          const SolverOptions& options) {
  inst.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tol must be positive");
  if (gamma_hi <= 0.0) gamma_hi = default_gamma_hi(inst);

  const NetworkShape shape =
      with_objective(inst.shape, StuffObjective::kTotalNorm);
  const Field field = kAppField;
  auto tmpl = cache.get(shape, field);
  NetworkInstance probe_inst = inst;
  probe_inst.shape = shape;
  ConeProgram scratch = tmpl->skeleton();

  MaxMinResult out;
  double lo = 0.0;
  double hi = gamma_hi;
  WarmStart warm;
  bool have_warm = false;
  SolveResult best;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    std::fill(probe_inst.sinr_target.begin(), probe_inst.sinr_target.end(), mid);
    tmpl->stuff_into(probe_inst, scratch);
    const SolveResult res = solve_probe(
        scratch, options, have_warm && options.warm_start_probes ? &warm : nullptr);
    bool feasible = false;
    if (res.status == SolveStatus::kOptimal) {
      feasible = true;
      best = res;
      warm.nu = res.nu;
      warm.eta = res.eta;
      warm.mu = res.mu;
      have_warm = true;
    } else if (res.status == SolveStatus::kIndeterminate) {
      throw SolverStatusError(res.status, "max-min probe ended with status " +
                                              to_string(res.status));
    }  // IterationLimit counts as infeasible, shrinking hi
    if (feasible)
      lo = mid;
    else
      hi = mid;
    out.trace.push_back({lo, hi, mid, feasible});
  }
  out.sinr = lo;
  out.min_rate_bps_hz = std::log2(1.0 + lo);
  if (best.status == SolveStatus::kOptimal) {
    std::fill(probe_inst.sinr_target.begin(), probe_inst.sinr_target.end(), lo);
    out.beamformers = recover_beamformers(*tmpl, probe_inst, best);
  }
  return out;
}

std::string to_string(BaselineScheme scheme) {
  switch (scheme) {
    case BaselineScheme::kZfbf: return "ZFBF";
    case BaselineScheme::kRzf: return "RZF";
    case BaselineScheme::kMrt: return "MRT";
  }
  return "Unknown";
}

MaxMinResult baseline_max_min(const NetworkInstance& inst,
                              BaselineScheme scheme, double tol,
                              double gamma_hi, const SolverOptions& options) {
  inst.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tol must be positive");
  const int num_user = inst.shape.num_user;
  const int num_rau = inst.shape.num_rau;
  const int n_ant = inst.shape.total_antennas();
  if (scheme == BaselineScheme::kZfbf && num_user > n_ant)
    throw std::invalid_argument("ZFBF requires at most as many users as antennas");
  if (gamma_hi <= 0.0) gamma_hi = default_gamma_hi(inst);

  Eigen::MatrixXcd h(n_ant, num_user);
  for (int k = 0; k < num_user; ++k)
    for (int j = 0; j < n_ant; ++j) h(j, k) = inst.channels[k][j];

  Eigen::MatrixXcd directions;
  switch (scheme) {
    case BaselineScheme::kMrt:
      directions = h;
      break;
    case BaselineScheme::kZfbf: {
      const Eigen::MatrixXcd gram = h.adjoint() * h;
      directions = h * gram.inverse();
      break;
    }
    case BaselineScheme::kRzf: {
      double sigma2_mean = 0.0;
      for (double s : inst.noise_std) sigma2_mean += s * s;
      sigma2_mean /= num_user;
      double total_power = 0.0;
      for (double p : inst.power_budget_w) total_power += p;
      const double loading = num_user * sigma2_mean / total_power;
      Eigen::MatrixXcd gram = h.adjoint() * h;
      gram += loading * Eigen::MatrixXcd::Identity(num_user, num_user);
      directions = h * gram.inverse();
      break;
    }
  }
  for (int k = 0; k < num_user; ++k) directions.col(k).normalize();

  // Link gains and per-RAU direction weights for the power-control LP.
  Eigen::MatrixXd gain(num_user, num_user);  // gain(k, i) = |h_k^H u_i|^2
  for (int k = 0; k < num_user; ++k)
    for (int i = 0; i < num_user; ++i)
      gain(k, i) = std::norm(h.col(k).dot(directions.col(i)));
  std::vector<std::vector<double>> rau_weight(num_rau,
                                              std::vector<double>(num_user));
  for (int l = 0; l < num_rau; ++l) {
    const int off = inst.shape.antenna_offset(l);
    for (int k = 0; k < num_user; ++k)
      rau_weight[l][k] =
          directions.col(k).segment(off, inst.shape.antennas[l]).squaredNorm();
  }

  // Feasibility LP at common target g over per-user powers p >= 0:
  //   gamma * sum_{i != k} p_i gain(k,i) - p_k gain(k,k) <= -gamma sigma_k^2
  //   sum_k p_k rau_weight(l,k) <= P_l
  auto probe_lp = [&](double gamma) {
    std::vector<Triplet> trips;
    std::vector<double> b(num_user + num_rau + num_user);
    for (int k = 0; k < num_user; ++k) {
      for (int i = 0; i < num_user; ++i) {
        const double coeff = i == k ? -gain(k, k) : gamma * gain(k, i);
        if (coeff != 0.0) trips.push_back({k, i, coeff});
      }
      b[k] = -gamma * inst.noise_std[k] * inst.noise_std[k];
    }
    for (int l = 0; l < num_rau; ++l) {
      for (int k = 0; k < num_user; ++k)
        if (rau_weight[l][k] != 0.0)
          trips.push_back({num_user + l, k, rau_weight[l][k]});
      b[num_user + l] = inst.power_budget_w[l];
    }
    for (int k = 0; k < num_user; ++k)
      trips.push_back({num_user + num_rau + k, k, -1.0});
    ConeProgram lp;
    lp.a = SparseMatrix::from_triplets(num_user + num_rau + num_user, num_user,
                                       trips);
    lp.b = std::move(b);
    lp.c.assign(num_user, 0.0);
    lp.cone = ConeSpec({{ConeKind::kNonNegative, num_user + num_rau + num_user}});
    return solve_probe(lp, options, nullptr);
  };

  MaxMinResult out;
  double lo = 0.0;
  double hi = gamma_hi;
  std::vector<double> best_p;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const SolveResult res = probe_lp(mid);
    bool feasible = false;
    if (res.status == SolveStatus::kOptimal) {
      feasible = true;
      best_p = res.nu;
    } else if (res.status == SolveStatus::kIndeterminate) {
      throw SolverStatusError(res.status, "baseline probe ended with status " +
                                              to_string(res.status));
    }  // IterationLimit counts as infeasible, shrinking hi
    if (feasible)
      lo = mid;
    else
      hi = mid;
    out.trace.push_back({lo, hi, mid, feasible});
  }
  out.sinr = lo;
  out.min_rate_bps_hz = std::log2(1.0 + lo);
  if (!best_p.empty()) {
    std::vector<std::vector<std::complex<double>>> v(num_user);
    for (int k = 0; k < num_user; ++k) {
      v[k].resize(n_ant);
      const double s = std::sqrt(std::max(0.0, best_p[k]));
      for (int j = 0; j < n_ant; ++j) v[k][j] = s * directions(j, k);
    }
    out.beamformers = evaluate_beamformers(inst, v);
  }
  return out;
}

double network_power_w(const PowerModelConfig& cfg,
                       const std::vector<bool>& active,
                       const std::vector<double>& rau_transmit_power_w) {
  double total = 0.0;
  for (std::size_t l = 0; l < active.size(); ++l) {
    if (!active[l]) continue;
    total += cfg.fronthaul_link_power_w +
             rau_transmit_power_w[l] / cfg.amplifier_efficiency;
  }
  return total;
}

}  // namespace conic
