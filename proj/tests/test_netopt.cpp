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

#include <doctest.h>

#include <cmath>
#include <complex>

#include "conic/netopt.hpp"

namespace {

using conic::BaselineScheme;
using conic::ChannelModelConfig;
using conic::Field;
using conic::NetworkInstance;
using conic::NetworkShape;
using conic::SolveStatus;
using conic::StuffObjective;
using conic::TemplateCache;

NetworkShape make_shape(int num_rau, int num_user, std::vector<int> antennas) {
  NetworkShape s;
  s.num_rau = num_rau;
  s.num_user = num_user;
  s.antennas = std::move(antennas);
  s.objective = StuffObjective::kTotalNorm;
  return s;
}

NetworkInstance single_user_instance(double h, double sigma, double gamma,
                                     double p) {
  NetworkInstance inst;
  inst.shape = make_shape(1, 1, {1});
  inst.channels = {{std::complex<double>(h, 0.0)}};
  inst.power_budget_w = {p};
  inst.noise_std = {sigma};
  inst.sinr_target = {gamma};
  return inst;
}

// Two single-antenna RAUs, each serving one user exclusively: channels are
// orthogonal, so interference vanishes and per-user closed forms apply.
NetworkInstance orthogonal_two_user_instance(double h1, double h2, double p) {
  NetworkInstance inst;
  inst.shape = make_shape(2, 2, {1, 1});
  inst.channels = {{{h1, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {h2, 0.0}}};
  inst.power_budget_w = {p, p};
  inst.noise_std = {1.0, 1.0};
  inst.sinr_target = {1.0, 1.0};
  return inst;
}

}  // namespace

TEST_CASE("network generation is deterministic under the seed") {
  ChannelModelConfig cfg;
  cfg.seed = 42;
  const NetworkShape shape = make_shape(3, 4, {2, 1, 2});
  const auto a = conic::generate_network(cfg, shape);
  const auto b = conic::generate_network(cfg, shape);
  REQUIRE(a.channels.size() == b.channels.size());
  for (std::size_t k = 0; k < a.channels.size(); ++k)
    CHECK(a.channels[k] == b.channels[k]);
  cfg.seed = 43;
  const auto c = conic::generate_network(cfg, shape);
  CHECK(a.channels[0] != c.channels[0]);
}

TEST_CASE("pathloss formula evaluates the configured model") {
  ChannelModelConfig cfg;
  CHECK(std::abs(conic::pathloss_db(cfg, 1000.0) - 128.1) <= 1e-12);
  CHECK(std::abs(conic::pathloss_db(cfg, 2000.0) -
                 (128.1 + 37.6 * std::log10(2.0))) <= 1e-12);
}

TEST_CASE("zero shadowing and frozen fading leave only the distance term") {
  ChannelModelConfig cfg;
  cfg.seed = 7;
  cfg.shadowing_std_db = 0.0;
  cfg.rayleigh_fading = false;
  cfg.antenna_gain = 1.0;
  cfg.normalize_noise = false;
  const NetworkShape shape = make_shape(2, 2, {1, 1});
  const auto inst = conic::generate_network(cfg, shape);
  for (const auto& h : inst.channels)
    for (const auto& v : h) {
      CHECK(v.imag() == 0.0);
      CHECK(v.real() > 0.0);
      CHECK(v.real() <= 1.0);  // distances are >= 1 m, loss is positive
    }
  CHECK(inst.noise_std[0] == std::sqrt(cfg.noise_power_w));
}

TEST_CASE("min_power single-user closed form") {
  TemplateCache cache;
  const auto inst = single_user_instance(1.0, 1.0, 1.0, 10.0);
  const auto out = conic::min_power(inst, cache);
  REQUIRE(out.status == SolveStatus::kOptimal);
  CHECK(out.solution->total_transmit_power_w == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("min_power on orthogonal users sums the per-user closed forms") {
  TemplateCache cache;
  const auto inst = orthogonal_two_user_instance(2.0, 0.5, 100.0);
  const auto out = conic::min_power(inst, cache);
  REQUIRE(out.status == SolveStatus::kOptimal);
  // power = sum_k gamma_k sigma_k^2 / ||h_k||^2 = 1/4 + 4
  CHECK(out.solution->total_transmit_power_w ==
        doctest::Approx(0.25 + 4.0).epsilon(1e-2));
}

TEST_CASE("min_power infeasibility carries a verified certificate") {
  TemplateCache cache;
  auto inst = single_user_instance(1.0, 1.0, 1.0, 10.0);
  for (double& g : inst.sinr_target) g *= 100.0;  // needs power 100 > 10
  const auto out = conic::min_power(inst, cache);
  REQUIRE(out.status == SolveStatus::kPrimalInfeasible);
  REQUIRE(out.certificate_report.has_value());
  CHECK(out.certificate_report->max_violation <= 1e-4);
}

TEST_CASE("min_power transmit power is non-decreasing in the targets") {
  TemplateCache cache;
  ChannelModelConfig cfg;
  cfg.seed = 11;
  cfg.region_half_width_m = 500.0;
  const NetworkShape shape = make_shape(3, 3, {2, 2, 2});
  auto inst = conic::generate_network(cfg, shape);
  const auto base = conic::min_power(inst, cache);
  REQUIRE(base.status == SolveStatus::kOptimal);
  for (double& g : inst.sinr_target) g *= 2.0;
  const auto doubled = conic::min_power(inst, cache);
  REQUIRE(doubled.status == SolveStatus::kOptimal);
  CHECK(doubled.solution->total_transmit_power_w >=
        base.solution->total_transmit_power_w * (1.0 - 1e-2));
  // budgets hold within tolerance
  for (int l = 0; l < shape.num_rau; ++l)
    CHECK(doubled.solution->rau_power_w[l] <=
          inst.power_budget_w[l] * (1.0 + 1e-2));
}

TEST_CASE("group sparse beamforming switches off a dead RAU") {
  TemplateCache cache;
  conic::PowerModelConfig power_cfg;
  // RAU 1 has negligible channels to both users; RAU 0 alone meets QoS.
  NetworkInstance inst;
  inst.shape = make_shape(2, 2, {2, 1});
  inst.shape.objective = StuffObjective::kTotalNorm;
  inst.channels = {{{1.2, 0.3}, {0.4, -0.2}, {1e-9, 0.0}},
                   {{-0.3, 0.8}, {1.1, 0.1}, {0.0, 1e-9}}};
  inst.power_budget_w = {100.0, 100.0};
  inst.noise_std = {1.0, 1.0};
  inst.sinr_target = {1.0, 1.0};
  const auto out = conic::group_sparse_beamforming(inst, power_cfg, cache);
  REQUIRE(out.feasible);
  CHECK(out.active_raus == std::vector<int>{0});
  CHECK(out.network_power_w < out.max_network_power_w);
  // every probe that kept an RAU on must have failed
  for (const auto& probe : out.probes) {
    const bool kept_on = std::find(out.active_raus.begin(), out.active_raus.end(),
                                   probe.rau) != out.active_raus.end();
    CHECK(kept_on == !probe.feasible);
  }
  // trace replay: switching any surviving RAU off at termination is
  // infeasible (its recorded probe tested a superset of the final set)
  for (const int rau : out.active_raus) {
    NetworkInstance replay = inst;
    for (int l = 0; l < inst.shape.num_rau; ++l) {
      const bool active = std::find(out.active_raus.begin(),
                                    out.active_raus.end(),
                                    l) != out.active_raus.end();
      if (!active || l == rau) replay.power_budget_w[l] = 0.0;
    }
    bool feasible = true;
    try {
      feasible = conic::min_power(replay, cache).status == SolveStatus::kOptimal;
    } catch (const conic::SolverStatusError&) {
      feasible = false;
    }
    CHECK(!feasible);
  }
}

TEST_CASE("group sparse beamforming with one RAU degenerates to feasibility") {
  TemplateCache cache;
  conic::PowerModelConfig power_cfg;
  auto inst = single_user_instance(1.0, 1.0, 1.0, 10.0);
  const auto out = conic::group_sparse_beamforming(inst, power_cfg, cache);
  REQUIRE(out.feasible);
  CHECK(out.active_raus == std::vector<int>{0});
  CHECK(out.network_power_w ==
        doctest::Approx(power_cfg.fronthaul_link_power_w +
                        1.0 / power_cfg.amplifier_efficiency)
            .epsilon(5e-2));
}

TEST_CASE("group sparse stage-1 infeasibility reports a certificate") {
  TemplateCache cache;
  conic::PowerModelConfig power_cfg;
  auto inst = single_user_instance(1.0, 1.0, 100.0, 0.5);
  const auto out = conic::group_sparse_beamforming(inst, power_cfg, cache);
  CHECK(!out.feasible);
  REQUIRE(out.certificate_report.has_value());
  CHECK(out.certificate_report->max_violation <= 1e-4);
  CHECK(out.active_raus.empty());
}

TEST_CASE("max_min_rate single-user closed form") {
  TemplateCache cache;
  auto inst = single_user_instance(1.0, 1.0, 1.0, 4.0);
  const double tol = 0.01;
  const auto out = conic::max_min_rate(inst, cache, tol);
  // SINR_max = P h^2 / sigma^2 = 4
  CHECK(out.sinr == doctest::Approx(4.0).epsilon(2 * tol));
  CHECK(out.min_rate_bps_hz == doctest::Approx(std::log2(5.0)).epsilon(1e-2));
  REQUIRE(out.beamformers.has_value());
  CHECK(out.beamformers->achieved_sinr[0] >= out.sinr * (1.0 - 0.05));
}

TEST_CASE("max_min_rate bisection uses exactly ceil(log2(hi/tol)) probes") {
  TemplateCache cache;
  auto inst = single_user_instance(1.0, 1.0, 1.0, 4.0);
  const double tol = 0.01;
  const double hi = 16.0;
  const auto out = conic::max_min_rate(inst, cache, tol, hi);
  CHECK(static_cast<int>(out.trace.size()) ==
        static_cast<int>(std::ceil(std::log2(hi / tol))));
  // interval endpoints shrink and stay bracketed
  for (std::size_t i = 1; i < out.trace.size(); ++i) {
    CHECK(out.trace[i].hi - out.trace[i].lo <=
          0.5 * (out.trace[i - 1].hi - out.trace[i - 1].lo) + 1e-12);
  }
  CHECK(out.trace.back().hi - out.trace.back().lo <= tol);
}

TEST_CASE("max_min_rate gives symmetric users the same rate") {
  TemplateCache cache;
  NetworkInstance inst;
  inst.shape = make_shape(1, 2, {2});
  inst.channels = {{{1.0, 0.0}, {0.5, 0.0}}, {{1.0, 0.0}, {0.5, 0.0}}};
  inst.power_budget_w = {10.0};
  inst.noise_std = {1.0, 1.0};
  inst.sinr_target = {1.0, 1.0};
  const auto out = conic::max_min_rate(inst, cache, 0.01);
  REQUIRE(out.beamformers.has_value());
  CHECK(out.beamformers->achieved_sinr[0] ==
        doctest::Approx(out.beamformers->achieved_sinr[1]).epsilon(0.05));
}

TEST_CASE("baselines coincide with the optimum for one user and one RAU") {
  TemplateCache cache;
  auto inst = single_user_instance(1.0, 1.0, 1.0, 4.0);
  const double tol = 0.01;
  const auto opt = conic::max_min_rate(inst, cache, tol);
  for (const auto scheme :
       {BaselineScheme::kZfbf, BaselineScheme::kRzf, BaselineScheme::kMrt}) {
    const auto base = conic::baseline_max_min(inst, scheme, tol);
    CHECK(base.sinr == doctest::Approx(opt.sinr).epsilon(0.02));
  }
}

TEST_CASE("optimal max-min dominates every baseline") {
  TemplateCache cache;
  ChannelModelConfig cfg;
  cfg.seed = 5;
  cfg.region_half_width_m = 800.0;
  const NetworkShape shape = make_shape(4, 3, {1, 1, 1, 1});
  auto inst = conic::generate_network(cfg, shape);
  const double tol = 0.01;
  const auto opt = conic::max_min_rate(inst, cache, tol);
  for (const auto scheme :
       {BaselineScheme::kZfbf, BaselineScheme::kRzf, BaselineScheme::kMrt}) {
    const auto base = conic::baseline_max_min(inst, scheme, tol);
    CHECK(opt.sinr >= base.sinr - 2 * tol);
  }
}

TEST_CASE("orthogonal channels make ZFBF, MRT and the optimum coincide") {
  TemplateCache cache;
  const auto inst = orthogonal_two_user_instance(1.0, 1.0, 4.0);
  const double tol = 0.005;
  const auto opt = conic::max_min_rate(inst, cache, tol);
  const auto zf = conic::baseline_max_min(inst, BaselineScheme::kZfbf, tol);
  const auto mrt = conic::baseline_max_min(inst, BaselineScheme::kMrt, tol);
  CHECK(zf.sinr == doctest::Approx(4.0).epsilon(2 * tol));
  CHECK(mrt.sinr == doctest::Approx(4.0).epsilon(2 * tol));
  CHECK(opt.sinr == doctest::Approx(4.0).epsilon(2 * tol));
}

TEST_CASE("ZFBF requires at most as many users as antennas") {
  TemplateCache cache;
  NetworkInstance inst;
  inst.shape = make_shape(1, 2, {1});  // K = 2 > N = 1
  inst.channels = {{{1.0, 0.0}}, {{0.5, 0.0}}};
  inst.power_budget_w = {1.0};
  inst.noise_std = {1.0, 1.0};
  inst.sinr_target = {1.0, 1.0};
  CHECK_THROWS_AS(conic::baseline_max_min(inst, BaselineScheme::kZfbf, 0.01),
                  std::invalid_argument);
}

TEST_CASE("feasibility is monotone in the common target") {
  TemplateCache cache;
  ChannelModelConfig cfg;
  cfg.seed = 3;
  cfg.region_half_width_m = 1000.0;
  const NetworkShape shape = make_shape(4, 4, {1, 1, 1, 1});
  auto inst = conic::generate_network(cfg, shape);
  bool prev_feasible = true;
  for (const double gamma_db : {-10.0, -4.0, 2.0, 8.0, 14.0, 20.0, 26.0}) {
    for (double& g : inst.sinr_target) g = std::pow(10.0, gamma_db / 10.0);
    conic::SolverOptions opts = conic::default_app_options();
    opts.max_iters = 100000;
    bool feasible = false;
    const auto out = conic::min_power(inst, cache, opts);
    feasible = out.status == SolveStatus::kOptimal;
    if (!prev_feasible) CHECK(!feasible);  // nested feasible sets
    prev_feasible = feasible;
  }
}

TEST_CASE("network power accounting") {
  conic::PowerModelConfig cfg;
  cfg.fronthaul_link_power_w = 5.6;
  cfg.amplifier_efficiency = 0.25;
  const std::vector<bool> active = {true, false, true};
  const std::vector<double> tx = {1.0, 7.0, 0.5};
  CHECK(conic::network_power_w(cfg, active, tx) ==
        doctest::Approx(5.6 + 4.0 + 5.6 + 2.0));
  conic::PowerModelConfig bad = cfg;
  bad.amplifier_efficiency = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
