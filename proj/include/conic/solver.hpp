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

#ifndef CONIC_SOLVER_HPP_
#define CONIC_SOLVER_HPP_

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "conic/cones.hpp"
#include "conic/ldl.hpp"
#include "conic/sparse.hpp"

namespace conic {

// minimize c'nu  subject to  A nu + mu = b,  mu in K.
struct ConeProgram {
  SparseMatrix a;
  std::vector<double> b;
  std::vector<double> c;
  ConeSpec cone;

  int num_vars() const { return a.cols(); }
  int num_constraints() const { return a.rows(); }
  void validate() const;  // throws std::invalid_argument
};

enum class SolveStatus {
  kOptimal,
  kPrimalInfeasible,
  kDualInfeasible,
  kIndeterminate,
  kIterationLimit,
};

std::string to_string(SolveStatus status);

struct SolverOptions {
  double eps = 1e-3;
  double eps_infeas = 1e-5;
  int max_iters = 20000;
  int check_interval = 25;
  double init_tau = 1.0;
  bool over_relax = false;       // alpha-averaged affine step when enabled
  double relax_alpha = 1.5;
  bool equilibrate = false;      // alternating row/col inf-norm scaling of A
  int equilibrate_rounds = 10;
  bool refine_solves = false;    // one refinement pass per subspace solve
  // Application-level: feasibility-probe loops reuse the previous feasible
  // solution as the next initial point. Ignored by the solver itself.
  bool warm_start_probes = true;
};

struct Residuals {
  double primal = std::numeric_limits<double>::quiet_NaN();
  double dual = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
};

// Optional initial point, given in the original (unscaled) problem space.
struct WarmStart {
  std::vector<double> nu;
  std::vector<double> eta;
  std::vector<double> mu;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kIterationLimit;
  double objective = std::numeric_limits<double>::quiet_NaN();
  Residuals residuals;
  int iterations = 0;
  double solve_time_ms = 0.0;
  // Populated when status == kOptimal.
  std::vector<double> nu;
  std::vector<double> eta;
  std::vector<double> mu;
  // Populated for the two infeasible statuses: eta/(-b'eta) certifies primal
  // infeasibility, nu/(-c'nu) certifies dual infeasibility.
  std::vector<double> certificate;
};

// One point of the embedding: u = (nu, eta, tau), v = (lambda, mu, kappa).
// After every ADMM step u lies in C = R^n x K* x R+, v lies in its dual cone
// (so the lambda block is identically zero), and <u, v> = 0.
struct EmbeddingIterate {
  std::vector<double> u;
  std::vector<double> v;
  int iteration = 0;
};

// Per-program state for the operator splitting iteration: the implicit
// skew-symmetric Q, the cached LDL' factorization of the reduced system, and
// the precomputed tau-elimination vector. Immutable after construction and
// shareable across concurrent solves.
class EmbeddingContext {
 public:
  explicit EmbeddingContext(ConeProgram program,
                            const SolverOptions& options = SolverOptions());

  const ConeProgram& program() const { return program_; }
  int embedding_dim() const { return dim_; }

  // y = Q x on the (scaled) problem data; exposed for diagnostics and tests.
  void apply_q(std::span<const double> x, std::span<double> y) const;

  // Solves (I + Q) out = w by eliminating the tau coordinate against the
  // cached factorization.
  std::vector<double> subspace_project(std::span<const double> w) const;

  EmbeddingIterate initial_iterate(const WarmStart* warm = nullptr) const;

  // One operator-splitting iteration: affine step, cone step, dual update.
  void step(EmbeddingIterate& it) const;

  SolveResult solve(const SolverOptions& options,
                    const WarmStart* warm = nullptr) const;

 private:
  struct CheckOutcome;
  void solve_m(std::span<const double> rhs, std::span<double> z,
               std::span<double> work) const;
  CheckOutcome check(const EmbeddingIterate& it, const SolverOptions& options,
                     SolveResult* result) const;

  ConeProgram program_;  // original data, used for termination checks
  int n_ = 0;
  int m_ = 0;
  int dim_ = 0;
  // Scaled copies (aliases of the original data when equilibration is off).
  SparseMatrix a_;
  std::vector<double> b_;
  std::vector<double> c_;
  bool scaled_ = false;
  std::vector<double> row_scale_;  // D
  std::vector<double> col_scale_;  // E
  double b_scale_ = 1.0;           // scalar units of b and c, unwound on exit
  double c_scale_ = 1.0;
  KktFactorization factorization_;
  std::vector<double> m_inv_h_;  // M^{-1} (c, b), computed once
  double rho_ = 1.0;             // 1 + h' M^{-1} h
  bool refine_ = false;
  double norm_b_ = 0.0;          // norms of the original data
  double norm_c_ = 0.0;
};

// Builds the embedding context; alias for the constructor, matching the
// factor-once usage in loops that reuse a context across solves.
EmbeddingContext build_embedding(const ConeProgram& program,
                                 const SolverOptions& options = SolverOptions());

SolveResult solve(const ConeProgram& program,
                  const SolverOptions& options = SolverOptions(),
                  const WarmStart* warm = nullptr);

struct CertificateReport {
  double max_violation = 0.0;    // worst of the three checks below
  double equality_violation = 0.0;
  double cone_distance = 0.0;
  double normalization_error = 0.0;
};

// Checks a returned infeasibility certificate against the problem data:
// primal case A'eta = 0, eta in K*, b'eta = -1; dual case -A nu in K,
// c'nu = -1. Throws std::logic_error for non-infeasible statuses.
CertificateReport verify_certificate(const ConeProgram& program,
                                     const SolveResult& result);

}  // namespace conic

#endif  // CONIC_SOLVER_HPP_
