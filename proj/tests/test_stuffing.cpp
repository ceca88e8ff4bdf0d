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
#include <random>
#include <set>

#include "conic/stuffing.hpp"
#include "conic/vec.hpp"
#include "oracles.hpp"

namespace {

using conic::ConeKind;
using conic::Field;
using conic::NetworkInstance;
using conic::NetworkShape;
using conic::SolveStatus;
using conic::StuffingTemplate;
using conic::StuffObjective;

NetworkShape make_shape(int num_rau, int num_user, std::vector<int> antennas,
                        StuffObjective obj = StuffObjective::kTotalNorm) {
  NetworkShape s;
  s.num_rau = num_rau;
  s.num_user = num_user;
  s.antennas = std::move(antennas);
  s.objective = obj;
  return s;
}

NetworkInstance random_instance(std::mt19937_64& rng, const NetworkShape& shape,
                                Field field, double power = 10.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  NetworkInstance inst;
  inst.shape = shape;
  inst.channels.assign(shape.num_user, {});
  for (auto& h : inst.channels) {
    h.resize(shape.total_antennas());
    for (auto& v : h)
      v = field == Field::kComplex ? std::complex<double>(g(rng), g(rng))
                                   : std::complex<double>(g(rng), 0.0);
  }
  inst.power_budget_w.assign(shape.num_rau, power);
  inst.noise_std.assign(shape.num_user, 1.0);
  inst.sinr_target.assign(shape.num_user, 1.0);
  return inst;
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

}  // namespace

TEST_CASE("complex lift reproduces the split of h^H v") {
  // h = (i): lift columns (Re,Im) = ((0,1), (-1,0)); v = (i) lifts to (0,1)
  const std::vector<std::complex<double>> h = {{0.0, 1.0}};
  const auto lift = conic::complex_to_real(h);
  CHECK(lift.real_part_row == std::vector<double>{0.0, 1.0});
  CHECK(lift.imag_part_row == std::vector<double>{-1.0, 0.0});
  const std::vector<double> v_lift = {0.0, 1.0};
  CHECK(conic::dot(lift.real_part_row, v_lift) == 1.0);  // h^H v = 1
  CHECK(conic::dot(lift.imag_part_row, v_lift) == 0.0);

  // real h has zero imaginary blocks
  const std::vector<std::complex<double>> hr = {{2.0, 0.0}, {3.0, 0.0}};
  const auto lr = conic::complex_to_real(hr);
  CHECK(lr.real_part_row == std::vector<double>{2.0, 3.0, 0.0, 0.0});
  CHECK(lr.imag_part_row == std::vector<double>{0.0, 0.0, 2.0, 3.0});

  // random identity h~' v~ = (Re, Im) of h^H v
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    std::vector<std::complex<double>> hc(n), vc(n);
    for (auto& x : hc) x = {g(rng), g(rng)};
    for (auto& x : vc) x = {g(rng), g(rng)};
    const auto l = conic::complex_to_real(hc);
    std::vector<double> vl(2 * n);
    for (int j = 0; j < n; ++j) {
      vl[j] = vc[j].real();
      vl[n + j] = vc[j].imag();
    }
    std::complex<double> want = 0.0;
    for (int j = 0; j < n; ++j) want += std::conj(hc[j]) * vc[j];
    CHECK(std::abs(conic::dot(l.real_part_row, vl) - want.real()) <= 1e-14);
    CHECK(std::abs(conic::dot(l.imag_part_row, vl) - want.imag()) <= 1e-14);
  }
}

TEST_CASE("template dimensions for the smallest shape") {
  const NetworkShape shape = make_shape(1, 1, {1});
  const auto real_tmpl = StuffingTemplate::build(shape, Field::kReal);
  CHECK(real_tmpl.skeleton().num_vars() == 4);
  CHECK(real_tmpl.skeleton().num_constraints() == 9);
  const auto blocks = real_tmpl.skeleton().cone.blocks();
  REQUIRE(blocks.size() == 5);
  CHECK(blocks[0].dim == 1);
  CHECK(blocks[1].dim == 1);
  CHECK(blocks[2].dim == 2);
  CHECK(blocks[3].dim == 2);
  CHECK(blocks[4].dim == 3);
  for (const auto& b : blocks) CHECK(b.kind == ConeKind::kSecondOrder);

  const auto cx_tmpl = StuffingTemplate::build(shape, Field::kComplex);
  CHECK(cx_tmpl.skeleton().num_vars() == 5);  // 1 + L + K + 2NK
  CHECK(cx_tmpl.skeleton().num_constraints() == 12);
}

TEST_CASE("smallest real template has the expected block pattern") {
  const NetworkShape shape = make_shape(1, 1, {1});
  const auto tmpl = StuffingTemplate::build(shape, Field::kReal);
  const auto inst = single_user_instance(1.0, 1.0, 1.0, 10.0);
  const conic::ConeProgram prog = tmpl.stuff(inst);
  const Eigen::MatrixXd a = conic::oracles::to_dense(prog.a);
  const double beta = std::sqrt(2.0);
  Eigen::MatrixXd want(9, 4);
  want << 0, 1, 0, 0,            // power budget row
      0, 0, 1, -beta,            // SINR row
      -1, 0, 0, 0, 0, 0, 0, -1,  // objective block
      0, -1, 0, 0, 0, 0, 0, -1,  // power block
      0, 0, -1, 0, 0, 0, 0, -1,  // QoS block rows
      0, 0, 0, 0;
  CHECK((a - want).norm() == 0.0);
  CHECK(prog.b[0] == std::sqrt(10.0));
  CHECK(prog.b[8] == 1.0);
  CHECK(prog.c == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("stuffing is a pure copy") {
  std::mt19937_64 rng(11);
  const NetworkShape shape = make_shape(2, 3, {2, 1});
  const auto tmpl = StuffingTemplate::build(shape, Field::kComplex);
  const auto inst = random_instance(rng, shape, Field::kComplex);
  const conic::ConeProgram p1 = tmpl.stuff(inst);
  const conic::ConeProgram p2 = tmpl.stuff(inst);
  CHECK(p1.a.values() == p2.a.values());
  CHECK(p1.b == p2.b);
  CHECK(p1.c == p2.c);
  CHECK(p1.a.same_pattern(p2.a));
}

TEST_CASE("pattern is preserved and stuff_into never reallocates") {
  std::mt19937_64 rng(13);
  const NetworkShape shape = make_shape(3, 2, {1, 2, 1});
  const auto tmpl = StuffingTemplate::build(shape, Field::kComplex);
  conic::ConeProgram prog = tmpl.skeleton();
  const auto* col_ptr_before = prog.a.col_ptr().data();
  const auto* row_idx_before = prog.a.row_idx().data();
  const auto col_ptr_copy = prog.a.col_ptr();
  const auto row_idx_copy = prog.a.row_idx();
  for (int trial = 0; trial < 5; ++trial) {
    const auto inst = random_instance(rng, shape, Field::kComplex);
    tmpl.stuff_into(inst, prog);
    CHECK(prog.a.col_ptr().data() == col_ptr_before);
    CHECK(prog.a.row_idx().data() == row_idx_before);
    CHECK(prog.a.col_ptr() == col_ptr_copy);
    CHECK(prog.a.row_idx() == row_idx_copy);
    CHECK(prog.a.nnz() == tmpl.skeleton().a.nnz());
  }
}

TEST_CASE("every stuffable slot appears in exactly one index map") {
  for (const Field field : {Field::kReal, Field::kComplex}) {
    for (const StuffObjective obj :
         {StuffObjective::kTotalNorm, StuffObjective::kGroupNorm}) {
      const NetworkShape shape = make_shape(2, 2, {2, 1}, obj);
      const auto tmpl = StuffingTemplate::build(shape, field);
      std::set<int> a_slots;
      std::size_t total = 0;
      for (int k = 0; k < shape.num_user; ++k) {
        for (int s : tmpl.sinr_slots(k)) a_slots.insert(s);
        for (int s : tmpl.channel_slots(k)) a_slots.insert(s);
        total += tmpl.sinr_slots(k).size() + tmpl.channel_slots(k).size();
      }
      CHECK(a_slots.size() == total);  // disjoint
      std::set<int> b_slots;
      for (int l = 0; l < shape.num_rau; ++l) b_slots.insert(tmpl.power_slot(l));
      for (int k = 0; k < shape.num_user; ++k) b_slots.insert(tmpl.noise_slot(k));
      CHECK(b_slots.size() ==
            static_cast<std::size_t>(shape.num_rau + shape.num_user));
    }
  }
}

TEST_CASE("stuffed programs match the dense canonicalizer entry-exactly") {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int num_rau = 1 + static_cast<int>(rng() % 4);
    const int num_user = 1 + static_cast<int>(rng() % 4);
    std::vector<int> antennas(num_rau);
    for (int& a : antennas) a = 1 + static_cast<int>(rng() % 2);
    const Field field = trial % 2 == 0 ? Field::kComplex : Field::kReal;
    const StuffObjective obj = trial % 3 == 0 ? StuffObjective::kGroupNorm
                                              : StuffObjective::kTotalNorm;
    const NetworkShape shape = make_shape(num_rau, num_user, antennas, obj);
    NetworkInstance inst = random_instance(rng, shape, field);
    std::uniform_real_distribution<double> u(0.5, 4.0);
    for (double& g : inst.sinr_target) g = u(rng);
    for (double& p : inst.power_budget_w) p = u(rng);
    for (double& s : inst.noise_std) s = u(rng);
    if (obj == StuffObjective::kGroupNorm) {
      inst.group_weights.resize(num_rau);
      for (double& w : inst.group_weights) w = u(rng);
    }

    const auto tmpl = StuffingTemplate::build(shape, field);
    const conic::ConeProgram got = tmpl.stuff(inst);
    const conic::ConeProgram want = conic::oracles::dense_canonicalize(inst, field);

    REQUIRE(got.num_vars() == want.num_vars());
    REQUIRE(got.num_constraints() == want.num_constraints());
    CHECK(got.cone == want.cone);
    CHECK(got.b == want.b);
    CHECK(got.c == want.c);
    const Eigen::MatrixXd dense_want = conic::oracles::to_dense(want.a);
    bool all_equal = true;
    for (int j = 0; j < got.num_vars() && all_equal; ++j)
      for (int i = 0; i < got.num_constraints(); ++i)
        if (got.a.coeff(i, j) != dense_want(i, j)) {
          all_equal = false;
          break;
        }
    CHECK(all_equal);
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("stuff validates shapes and fields") {
  std::mt19937_64 rng(19);
  const NetworkShape shape = make_shape(2, 2, {1, 1});
  const auto tmpl = StuffingTemplate::build(shape, Field::kComplex);
  auto inst = random_instance(rng, make_shape(2, 3, {1, 1}), Field::kComplex);
  CHECK_THROWS_AS(tmpl.stuff(inst), std::invalid_argument);

  const auto real_tmpl = StuffingTemplate::build(shape, Field::kReal);
  auto cx = random_instance(rng, shape, Field::kComplex);
  CHECK_THROWS_AS(real_tmpl.stuff(cx), std::invalid_argument);
}

TEST_CASE("single-user solve recovers the closed-form beamformer") {
  const auto inst = single_user_instance(1.0, 1.0, 1.0, 10.0);
  for (const Field field : {Field::kReal, Field::kComplex}) {
    const auto tmpl = StuffingTemplate::build(inst.shape, field);
    const auto prog = tmpl.stuff(inst);
    const auto res = conic::solve(prog);
    REQUIRE(res.status == SolveStatus::kOptimal);
    const auto sol = conic::recover_beamformers(tmpl, inst, res);
    CHECK(sol.total_transmit_power_w == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(sol.rau_power_w[0] == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(sol.achieved_sinr[0] == doctest::Approx(1.0).epsilon(2e-2));
    CHECK(std::abs(sol.beamformers[0][0][0]) == doctest::Approx(1.0).epsilon(1e-2));
  }
}

TEST_CASE("tiny SINR target scales the power closed form") {
  const double gamma = 1e-6;
  const auto inst = single_user_instance(1.0, 1.0, gamma, 10.0);
  const auto tmpl = StuffingTemplate::build(inst.shape, Field::kComplex);
  conic::SolverOptions opts;
  opts.eps = 1e-9;  // the solution scale is 1e-6, relative tolerances need room
  opts.max_iters = 200000;
  const auto res = conic::solve(tmpl.stuff(inst), opts);
  REQUIRE(res.status == SolveStatus::kOptimal);
  const auto sol = conic::recover_beamformers(tmpl, inst, res);
  // gamma sigma^2 / h^2 = 1e-6
  CHECK(sol.total_transmit_power_w == doctest::Approx(1e-6).epsilon(0.2));
}

TEST_CASE("achieved SINRs meet targets up to solver tolerance") {
  std::mt19937_64 rng(23);
  conic::SolverOptions opts;
  for (int trial = 0; trial < 5; ++trial) {
    const NetworkShape shape = make_shape(3, 2, {2, 2, 2});
    NetworkInstance inst = random_instance(rng, shape, Field::kComplex, 50.0);
    const auto tmpl = StuffingTemplate::build(shape, Field::kComplex);
    const auto res = conic::solve(tmpl.stuff(inst), opts);
    REQUIRE(res.status == SolveStatus::kOptimal);
    const auto sol = conic::recover_beamformers(tmpl, inst, res);
    for (int k = 0; k < shape.num_user; ++k)
      CHECK(sol.achieved_sinr[k] >=
            inst.sinr_target[k] * (1.0 - 10.0 * opts.eps));
  }
}

TEST_CASE("non-optimal results cannot be recovered") {
  const auto inst = single_user_instance(1.0, 1.0, 1.0, 0.5);
  const auto tmpl = StuffingTemplate::build(inst.shape, Field::kComplex);
  const auto res = conic::solve(tmpl.stuff(inst));
  REQUIRE(res.status == SolveStatus::kPrimalInfeasible);
  CHECK_THROWS_AS(conic::recover_beamformers(tmpl, inst, res), std::logic_error);
}

TEST_CASE("group-norm objective equals the weighted sum of group norms") {
  std::mt19937_64 rng(29);
  conic::SolverOptions opts;
  const NetworkShape shape = make_shape(3, 2, {1, 2, 1}, StuffObjective::kGroupNorm);
  NetworkInstance inst = random_instance(rng, shape, Field::kComplex, 50.0);
  inst.group_weights = {1.0, 2.0, 0.5};
  const auto tmpl = StuffingTemplate::build(shape, Field::kComplex);
  const auto res = conic::solve(tmpl.stuff(inst), opts);
  REQUIRE(res.status == SolveStatus::kOptimal);
  const auto sol = conic::recover_beamformers(tmpl, inst, res);
  double want = 0.0;
  for (int l = 0; l < 3; ++l) want += inst.group_weights[l] * sol.group_norms[l];
  CHECK(res.objective == doctest::Approx(want).epsilon(10 * opts.eps));
}

TEST_CASE("total-norm objective equals the beamformer norm") {
  std::mt19937_64 rng(31);
  conic::SolverOptions opts;
  const NetworkShape shape = make_shape(2, 2, {2, 1});
  NetworkInstance inst = random_instance(rng, shape, Field::kComplex, 50.0);
  const auto tmpl = StuffingTemplate::build(shape, Field::kComplex);
  const auto res = conic::solve(tmpl.stuff(inst), opts);
  REQUIRE(res.status == SolveStatus::kOptimal);
  const auto sol = conic::recover_beamformers(tmpl, inst, res);
  CHECK(res.objective == doctest::Approx(std::sqrt(sol.total_transmit_power_w))
                             .epsilon(10 * opts.eps));
}

// At desk scale the gap residual can be the binding criterion at
// termination, so loose-vs-tight agreement is looser here than on the larger
// acceptance-suite instances, where the 0.05% figure is enforced.
TEST_CASE("accuracy consistency on stuffed instances") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 5; ++trial) {
    const NetworkShape shape = make_shape(3, 3, {2, 2, 2});
    NetworkInstance inst = random_instance(rng, shape, Field::kComplex, 100.0);
    const auto tmpl = StuffingTemplate::build(shape, Field::kComplex);
    const auto prog = tmpl.stuff(inst);
    conic::SolverOptions loose;
    loose.eps = 1e-3;
    conic::SolverOptions tight;
    tight.eps = 1e-6;
    tight.max_iters = 200000;
    const auto r_loose = conic::solve(prog, loose);
    const auto r_tight = conic::solve(prog, tight);
    REQUIRE(r_loose.status == SolveStatus::kOptimal);
    REQUIRE(r_tight.status == SolveStatus::kOptimal);
    CHECK(std::abs(r_loose.objective - r_tight.objective) /
              std::abs(r_tight.objective) <=
          2e-3);
  }
}

TEST_CASE("template cache shares instances per key") {
  conic::TemplateCache cache;
  const NetworkShape shape = make_shape(2, 2, {1, 1});
  const auto t1 = cache.get(shape, Field::kComplex);
  const auto t2 = cache.get(shape, Field::kComplex);
  CHECK(t1.get() == t2.get());
  const auto t3 = cache.get(shape, Field::kReal);
  CHECK(t1.get() != t3.get());
  NetworkShape grouped = shape;
  grouped.objective = StuffObjective::kGroupNorm;
  const auto t4 = cache.get(grouped, Field::kComplex);
  CHECK(t1.get() != t4.get());
}
