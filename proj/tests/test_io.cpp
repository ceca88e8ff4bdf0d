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

#include <json.hpp>
#include <random>
#include <sstream>

#include "conic/io.hpp"
#include "conic/netopt.hpp"

namespace {

using conic::ConeKind;
using conic::ConeProgram;
using conic::ConeSpec;
using conic::Field;
using conic::NetworkShape;
using conic::SparseMatrix;
using conic::Triplet;

ConeProgram sample_program() {
  ConeProgram prog;
  prog.a = SparseMatrix::from_triplets(
      3, 2, std::vector<Triplet>{{0, 0, 1.5}, {2, 0, -2.0}, {1, 1, 0.25}});
  prog.b = {1.0, -0.5, 3.25};
  prog.c = {2.0, -1.0};
  prog.cone = ConeSpec({{ConeKind::kZero, 1}, {ConeKind::kSecondOrder, 2}});
  return prog;
}

NetworkShape make_shape(int num_rau, int num_user, std::vector<int> antennas) {
  NetworkShape s;
  s.num_rau = num_rau;
  s.num_user = num_user;
  s.antennas = std::move(antennas);
  return s;
}

}  // namespace

TEST_CASE("cone program text format round trips") {
  const ConeProgram prog = sample_program();
  std::stringstream ss;
  conic::write_cone_program(ss, prog);
  const ConeProgram back = conic::read_cone_program(ss);
  CHECK(back.num_vars() == 2);
  CHECK(back.num_constraints() == 3);
  CHECK(back.b == prog.b);
  CHECK(back.c == prog.c);
  CHECK(back.cone == prog.cone);
  CHECK(back.a.same_pattern(prog.a));
  CHECK(back.a.values() == prog.a.values());
}

TEST_CASE("parse errors carry line and column") {
  // bad number in the c line (line 4, third value)
  const std::string text =
      "n: 2\nm: 3\ncones: z:1 q:2\nc: 1 oops\nb: 0 0 0\n"
      "%%MatrixMarket matrix coordinate real general\n3 2 1\n1 1 1.0\n";
  std::stringstream ss(text);
  try {
    conic::read_cone_program(ss);
    FAIL("expected a parse error");
  } catch (const conic::ParseError& e) {
    CHECK(e.line == 4);
    CHECK(e.column == 6);
  }

  // malformed header
  std::stringstream bad_header("x: 2\n");
  CHECK_THROWS_AS(conic::read_cone_program(bad_header), conic::ParseError);

  // out-of-range matrix index
  const std::string oob =
      "n: 2\nm: 3\ncones: z:1 q:2\nc: 1 0\nb: 0 0 0\n"
      "%%MatrixMarket matrix coordinate real general\n3 2 1\n4 1 1.0\n";
  std::stringstream ss2(oob);
  try {
    conic::read_cone_program(ss2);
    FAIL("expected a parse error");
  } catch (const conic::ParseError& e) {
    CHECK(e.line == 8);
    CHECK(e.column == 1);
  }

  // cone dimension disagrees with m
  const std::string badcone =
      "n: 2\nm: 3\ncones: z:1 q:3\nc: 1 0\nb: 0 0 0\n"
      "%%MatrixMarket matrix coordinate real general\n3 2 1\n1 1 1.0\n";
  std::stringstream ss3(badcone);
  CHECK_THROWS_AS(conic::read_cone_program(ss3), conic::ParseError);
}

TEST_CASE("matrix market block is one-based and value-exact") {
  const ConeProgram prog = sample_program();
  std::stringstream ss;
  conic::write_matrix_market(ss, prog.a);
  const std::string text = ss.str();
  CHECK(text.find("1 1 1.5") != std::string::npos);
  CHECK(text.find("3 1 -2") != std::string::npos);
  std::stringstream in(text);
  const SparseMatrix back = conic::read_matrix_market(in, nullptr);
  CHECK(back.same_pattern(prog.a));
  CHECK(back.values() == prog.a.values());
}

TEST_CASE("result json carries the schema fields") {
  conic::SolveResult res;
  res.status = conic::SolveStatus::kOptimal;
  res.objective = 1.25;
  res.residuals = {1e-4, 2e-4, 3e-5};
  res.iterations = 250;
  res.solve_time_ms = 12.5;
  res.nu = {1.0, -1.0};
  res.eta = {0.5};
  res.mu = {0.0};
  const auto j = nlohmann::json::parse(conic::result_to_json(res));
  CHECK(j.at("status") == "Optimal");
  CHECK(j.at("objective") == 1.25);
  CHECK(j.at("residuals").at("primal") == 1e-4);
  CHECK(j.at("residuals").at("dual") == 2e-4);
  CHECK(j.at("residuals").at("gap") == 3e-5);
  CHECK(j.at("iterations") == 250);
  CHECK(j.at("nu").size() == 2);
  CHECK(!j.contains("certificate"));

  conic::SolveResult inf;
  inf.status = conic::SolveStatus::kPrimalInfeasible;
  inf.certificate = {1.0, 2.0};
  const auto ji = nlohmann::json::parse(conic::result_to_json(inf));
  CHECK(ji.at("status") == "PrimalInfeasible");
  CHECK(ji.at("certificate").size() == 2);
  CHECK(!ji.contains("nu"));
}

TEST_CASE("instance json round trips") {
  conic::ChannelModelConfig cfg;
  cfg.seed = 99;
  const NetworkShape shape = make_shape(2, 3, {2, 1});
  auto inst = conic::generate_network(cfg, shape);
  inst.group_weights = {1.0, 2.5};
  const std::string text = conic::instance_to_json(inst);
  const auto back = conic::instance_from_json(text);
  CHECK(back.shape == inst.shape);
  CHECK(back.power_budget_w == inst.power_budget_w);
  CHECK(back.noise_std == inst.noise_std);
  CHECK(back.sinr_target == inst.sinr_target);
  CHECK(back.group_weights == inst.group_weights);
  for (int k = 0; k < shape.num_user; ++k)
    CHECK(back.channels[k] == inst.channels[k]);

  CHECK_THROWS(conic::instance_from_json("{\"L\": 1}"));
}

TEST_CASE("template persistence round trips through files") {
  const NetworkShape shape = make_shape(2, 2, {1, 2});
  const auto tmpl = conic::StuffingTemplate::build(shape, Field::kComplex);
  const std::string prog_path = "/tmp/conic_test_template.prog";
  const std::string sidecar_path = "/tmp/conic_test_template.json";
  conic::save_template(prog_path, sidecar_path, tmpl);
  const auto back = conic::load_template(prog_path, sidecar_path);
  CHECK(back.shape() == shape);
  CHECK(back.field() == Field::kComplex);
  CHECK(back.skeleton().a.same_pattern(tmpl.skeleton().a));

  // a reloaded template stuffs identically
  conic::ChannelModelConfig cfg;
  cfg.seed = 17;
  auto inst = conic::generate_network(cfg, shape);
  const ConeProgram p1 = tmpl.stuff(inst);
  const ConeProgram p2 = back.stuff(inst);
  CHECK(p1.a.values() == p2.a.values());
  CHECK(p1.b == p2.b);
  CHECK(p1.c == p2.c);
}
