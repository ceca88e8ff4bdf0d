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

#include "conic/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "conic/ordering.hpp"
#include "conic/vec.hpp"

namespace conic {

namespace {

constexpr double kIndeterminateTol = 1e-9;
constexpr double kTinyTau = 1e-12;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  const auto now = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(now - start).count();
}

}  // namespace

void ConeProgram::validate() const {
  if (a.rows() != static_cast<int>(b.size()))
    throw std::invalid_argument("b length does not match row count of A");
  if (a.cols() != static_cast<int>(c.size()))
    throw std::invalid_argument("c length does not match column count of A");
  if (cone.dim() != a.rows())
    throw std::invalid_argument("cone dimension does not match row count of A");
  if (!a.all_finite() || !all_finite(b) || !all_finite(c))
    throw std::invalid_argument("cone program data contains non-finite entries");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kPrimalInfeasible: return "PrimalInfeasible";
    case SolveStatus::kDualInfeasible: return "DualInfeasible";
    case SolveStatus::kIndeterminate: return "Indeterminate";
    case SolveStatus::kIterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

EmbeddingContext::EmbeddingContext(ConeProgram program,
                                   const SolverOptions& options)
    : program_(std::move(program)) {
  program_.validate();
  n_ = program_.num_vars();
  m_ = program_.num_constraints();
  dim_ = n_ + m_ + 1;
  refine_ = options.refine_solves;
  norm_b_ = norm2(program_.b);
  norm_c_ = norm2(program_.c);

  a_ = program_.a;
  b_ = program_.b;
  c_ = program_.c;
  if (options.equilibrate) {
    scaled_ = true;
    row_scale_.assign(m_, 1.0);
    col_scale_.assign(n_, 1.0);
    std::vector<double> rn(m_), cn(n_);
    for (int round = 0; round < options.equilibrate_rounds; ++round) {
      set_zero(rn);
      set_zero(cn);
      for (int j = 0; j < n_; ++j) {
        for (int p = a_.col_ptr()[j]; p < a_.col_ptr()[j + 1]; ++p) {
          const double v = std::abs(a_.values()[p]);
          rn[a_.row_idx()[p]] = std::max(rn[a_.row_idx()[p]], v);
          cn[j] = std::max(cn[j], v);
        }
      }
      // Rows of one second-order block must share a scale to keep mu in K;
      // use the mean of the block's row norms.
      int offset = 0;
      for (const ConeBlock& blk : program_.cone.blocks()) {
        if (blk.kind == ConeKind::kSecondOrder && blk.dim > 1) {
          double mean = 0.0;
          for (int i = 0; i < blk.dim; ++i) mean += rn[offset + i];
          mean /= blk.dim;
          for (int i = 0; i < blk.dim; ++i) rn[offset + i] = mean;
        }
        offset += blk.dim;
      }
      std::vector<double> rs(m_), cs(n_);
      for (int i = 0; i < m_; ++i) rs[i] = rn[i] > 0.0 ? 1.0 / std::sqrt(rn[i]) : 1.0;
      for (int j = 0; j < n_; ++j) cs[j] = cn[j] > 0.0 ? 1.0 / std::sqrt(cn[j]) : 1.0;
      a_.scale_rows_cols(rs, cs);
      for (int i = 0; i < m_; ++i) row_scale_[i] *= rs[i];
      for (int j = 0; j < n_; ++j) col_scale_[j] *= cs[j];
    }
    for (int i = 0; i < m_; ++i) b_[i] = row_scale_[i] * program_.b[i];
    for (int j = 0; j < n_; ++j) c_[j] = col_scale_[j] * program_.c[j];
    // Scalar change of units balancing the primal and dual blocks of the
    // embedding; unwound exactly on extraction.
    const double nb = norm2(b_);
    const double nc = norm2(c_);
    if (nb > 0.0) b_scale_ = 1.0 / nb;
    if (nc > 0.0) c_scale_ = 1.0 / nc;
    scale(b_scale_, b_);
    scale(c_scale_, c_);
  }

  const SparseMatrix s = build_kkt(a_);
  const std::vector<int> perm = symbolic_order(s);
  factorization_ = ldl_factor(s, perm);

  // h = (c, b); cache g = M^{-1} h and rho = 1 + h'g for tau elimination.
  std::vector<double> h(n_ + m_);
  for (int j = 0; j < n_; ++j) h[j] = c_[j];
  for (int i = 0; i < m_; ++i) h[n_ + i] = b_[i];
  m_inv_h_.assign(n_ + m_, 0.0);
  std::vector<double> work(n_ + m_);
  solve_m(h, m_inv_h_, work);
  rho_ = 1.0 + dot(h, m_inv_h_);
}

EmbeddingContext build_embedding(const ConeProgram& program,
                                 const SolverOptions& options) {
  return EmbeddingContext(program, options);
}

void EmbeddingContext::apply_q(std::span<const double> x,
                               std::span<double> y) const {
  if (static_cast<int>(x.size()) != dim_ || static_cast<int>(y.size()) != dim_)
    throw std::invalid_argument("apply_q dimension mismatch");
  auto x_nu = x.subspan(0, n_);
  auto x_eta = x.subspan(n_, m_);
  const double x_tau = x[n_ + m_];
  auto y_lambda = y.subspan(0, n_);
  auto y_mu = y.subspan(n_, m_);
  // lambda = A'eta + c tau ; mu = -A nu + b tau ; kappa = -c'nu - b'eta
  a_.multiply_transpose(x_eta, y_lambda);
  axpy(x_tau, c_, y_lambda);
  a_.multiply(x_nu, y_mu);
  scale(-1.0, y_mu);
  axpy(x_tau, b_, y_mu);
  y[n_ + m_] = -dot(c_, x_nu) - dot(b_, x_eta);
}

// Solves M z = rhs with M = [[I, A'], [-A, I]] through the factored
// quasidefinite S = [[I, -A'], [-A, -I]], using S (z_nu, -z_eta) = M z.
void EmbeddingContext::solve_m(std::span<const double> rhs, std::span<double> z,
                               std::span<double> work) const {
  factorization_.solve(rhs, z);
  for (int i = 0; i < m_; ++i) z[n_ + i] = -z[n_ + i];
  if (refine_) {
    // r = rhs - M z, one corrective solve
    auto z_nu = z.subspan(0, n_);
    auto z_eta = z.subspan(n_, m_);
    auto r = work;
    std::vector<double> tmp_n(n_), tmp_m(m_);
    a_.multiply_transpose(z_eta, tmp_n);
    for (int j = 0; j < n_; ++j) r[j] = rhs[j] - z[j] - tmp_n[j];
    a_.multiply(z_nu, tmp_m);
    for (int i = 0; i < m_; ++i) r[n_ + i] = rhs[n_ + i] - z[n_ + i] + tmp_m[i];
    std::vector<double> corr(n_ + m_);
    factorization_.solve(r, corr);
    for (int i = 0; i < m_; ++i) corr[n_ + i] = -corr[n_ + i];
    for (int k = 0; k < n_ + m_; ++k) z[k] += corr[k];
  }
}

std::vector<double> EmbeddingContext::subspace_project(
    std::span<const double> w) const {
  if (static_cast<int>(w.size()) != dim_)
    throw std::invalid_argument("subspace_project dimension mismatch");
  std::vector<double> out(dim_);
  std::vector<double> t(n_ + m_);
  std::vector<double> work(n_ + m_);
  solve_m(w.subspan(0, n_ + m_), t, work);
  const double w_tau = w[n_ + m_];
  // tau_tilde = (w_tau + h' M^{-1} w_head) / rho with h = (c, b)
  double ht = 0.0;
  for (int j = 0; j < n_; ++j) ht += c_[j] * t[j];
  for (int i = 0; i < m_; ++i) ht += b_[i] * t[n_ + i];
  const double tau_tilde = (w_tau + ht) / rho_;
  for (int k = 0; k < n_ + m_; ++k) out[k] = t[k] - m_inv_h_[k] * tau_tilde;
  out[n_ + m_] = tau_tilde;
  return out;
}

EmbeddingIterate EmbeddingContext::initial_iterate(const WarmStart* warm) const {
  EmbeddingIterate it;
  it.u.assign(dim_, 0.0);
  it.v.assign(dim_, 0.0);
  it.u[n_ + m_] = 1.0;  // tau = 1, kappa = 0, rest zero
  if (warm != nullptr) {
    if (static_cast<int>(warm->nu.size()) != n_ ||
        static_cast<int>(warm->eta.size()) != m_ ||
        static_cast<int>(warm->mu.size()) != m_)
      throw std::invalid_argument("warm start dimension mismatch");
    for (int j = 0; j < n_; ++j)
      it.u[j] = scaled_ ? warm->nu[j] * b_scale_ / col_scale_[j] : warm->nu[j];
    for (int i = 0; i < m_; ++i) {
      it.u[n_ + i] =
          scaled_ ? warm->eta[i] * c_scale_ / row_scale_[i] : warm->eta[i];
      it.v[n_ + i] =
          scaled_ ? warm->mu[i] * row_scale_[i] * b_scale_ : warm->mu[i];
    }
  }
  return it;
}

void EmbeddingContext::step(EmbeddingIterate& it) const {
  std::vector<double> w(dim_);
  for (int k = 0; k < dim_; ++k) w[k] = it.u[k] + it.v[k];
  const std::vector<double> affine = subspace_project(w);
  // cone step: u = Pi_C(affine - v) with C = R^n x K* x R+
  std::vector<double> arg(dim_);
  for (int k = 0; k < dim_; ++k) arg[k] = affine[k] - it.v[k];
  std::vector<double> u_next(dim_);
  for (int j = 0; j < n_; ++j) u_next[j] = arg[j];
  project_dual_cone(program_.cone, std::span<const double>(arg).subspan(n_, m_),
                    std::span<double>(u_next).subspan(n_, m_));
  u_next[n_ + m_] = std::max(arg[n_ + m_], 0.0);
  for (int k = 0; k < dim_; ++k)
    it.v[k] = it.v[k] - affine[k] + u_next[k];
  it.u = std::move(u_next);
  ++it.iteration;
}

struct EmbeddingContext::CheckOutcome {
  bool done = false;
};

EmbeddingContext::CheckOutcome EmbeddingContext::check(
    const EmbeddingIterate& it, const SolverOptions& options,
    SolveResult* result) const {
  const double tau = it.u[n_ + m_];
  const double kappa = it.v[n_ + m_];

  // Unscale to the original problem space.
  std::vector<double> nu(n_), eta(m_), mu(m_);
  for (int j = 0; j < n_; ++j)
    nu[j] = scaled_ ? col_scale_[j] * it.u[j] / b_scale_ : it.u[j];
  for (int i = 0; i < m_; ++i) {
    eta[i] = scaled_ ? row_scale_[i] * it.u[n_ + i] / c_scale_ : it.u[n_ + i];
    mu[i] = scaled_ ? it.v[n_ + i] / (row_scale_[i] * b_scale_) : it.v[n_ + i];
  }

  if (tau > kTinyTau) {
    std::vector<double> pres(m_), dres(n_);
    program_.a.multiply(nu, pres);
    for (int i = 0; i < m_; ++i)
      pres[i] = (pres[i] + mu[i]) / tau - program_.b[i];
    program_.a.multiply_transpose(eta, dres);
    for (int j = 0; j < n_; ++j) dres[j] = dres[j] / tau + program_.c[j];
    const double pobj = dot(program_.c, nu) / tau;
    const double dobj = dot(program_.b, eta) / tau;  // b'eta-hat; dual obj is -dobj
    const double rp = norm2(pres) / (1.0 + norm_b_);
    const double rd = norm2(dres) / (1.0 + norm_c_);
    const double rg = std::abs(pobj + dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (rp <= options.eps && rd <= options.eps && rg <= options.eps) {
      result->status = SolveStatus::kOptimal;
      result->objective = pobj;
      result->residuals = {rp, rd, rg};
      result->nu.resize(n_);
      result->eta.resize(m_);
      result->mu.resize(m_);
      for (int j = 0; j < n_; ++j) result->nu[j] = nu[j] / tau;
      for (int i = 0; i < m_; ++i) {
        result->eta[i] = eta[i] / tau;
        result->mu[i] = mu[i] / tau;
      }
      return {true};
    }
    result->residuals = {rp, rd, rg};  // best-effort diagnostics
  }

  // Case 2a: b'eta < 0 with A'eta ~ 0 certifies primal infeasibility.
  const double bt_eta = dot(program_.b, eta);
  if (norm_b_ > 0.0 && bt_eta < 0.0) {
    std::vector<double> at_eta(n_);
    program_.a.multiply_transpose(eta, at_eta);
    if (norm2(at_eta) <= options.eps_infeas * (-bt_eta) / norm_b_) {
      result->status = SolveStatus::kPrimalInfeasible;
      result->certificate.resize(m_);
      for (int i = 0; i < m_; ++i) result->certificate[i] = eta[i] / (-bt_eta);
      return {true};
    }
  }

  // Case 2b: c'nu < 0 with -A nu in K certifies dual infeasibility.
  const double ct_nu = dot(program_.c, nu);
  if (norm_c_ > 0.0 && ct_nu < 0.0) {
    std::vector<double> a_nu(m_);
    program_.a.multiply(nu, a_nu);
    scale(-1.0, a_nu);
    if (cone_distance(program_.cone, a_nu) <=
        options.eps_infeas * (-ct_nu) / norm_c_) {
      result->status = SolveStatus::kDualInfeasible;
      result->certificate.resize(n_);
      for (int j = 0; j < n_; ++j) result->certificate[j] = nu[j] / (-ct_nu);
      return {true};
    }
  }

  // Case 3: the iterate collapsed toward the all-zero solution.
  if (tau <= kIndeterminateTol && kappa <= kIndeterminateTol &&
      norm2(it.u) <= kIndeterminateTol && norm2(it.v) <= kIndeterminateTol) {
    result->status = SolveStatus::kIndeterminate;
    return {true};
  }
  return {false};
}

SolveResult EmbeddingContext::solve(const SolverOptions& options,
                                    const WarmStart* warm) const {
  const auto start = std::chrono::steady_clock::now();
  SolveResult result;
  EmbeddingIterate it = initial_iterate(warm);

  std::vector<double> w(dim_), affine(dim_), arg(dim_), t(n_ + m_),
      work(n_ + m_);
  const bool relax = options.over_relax;
  const double alpha = options.relax_alpha;
  if (options.init_tau != 1.0 && warm == nullptr) it.u[n_ + m_] = options.init_tau;

  // A warm start may already satisfy the termination tests.
  result.iterations = 0;
  if (check(it, options, &result).done) {
    result.solve_time_ms = elapsed_ms(start);
    return result;
  }

  for (int iter = 1; iter <= options.max_iters; ++iter) {
    // Inlined step() with preallocated buffers.
    for (int k = 0; k < dim_; ++k) w[k] = it.u[k] + it.v[k];
    solve_m(std::span<const double>(w).subspan(0, n_ + m_), t, work);
    double ht = 0.0;
    for (int j = 0; j < n_; ++j) ht += c_[j] * t[j];
    for (int i = 0; i < m_; ++i) ht += b_[i] * t[n_ + i];
    const double tau_tilde = (w[n_ + m_] + ht) / rho_;
    for (int k = 0; k < n_ + m_; ++k) affine[k] = t[k] - m_inv_h_[k] * tau_tilde;
    affine[n_ + m_] = tau_tilde;

    if (relax) {
      for (int k = 0; k < dim_; ++k)
        affine[k] = alpha * affine[k] + (1.0 - alpha) * it.u[k];
    }
    for (int k = 0; k < dim_; ++k) arg[k] = affine[k] - it.v[k];
    for (int j = 0; j < n_; ++j) it.u[j] = arg[j];
    project_dual_cone(program_.cone,
                      std::span<const double>(arg).subspan(n_, m_),
                      std::span<double>(it.u).subspan(n_, m_));
    it.u[n_ + m_] = std::max(arg[n_ + m_], 0.0);
    for (int k = 0; k < dim_; ++k) it.v[k] += it.u[k] - affine[k];
    it.iteration = iter;

    if (iter % options.check_interval == 0 || iter == options.max_iters) {
      result.iterations = iter;
      if (check(it, options, &result).done) {
        result.solve_time_ms = elapsed_ms(start);
        return result;
      }
    }
  }
  result.status = SolveStatus::kIterationLimit;
  result.iterations = options.max_iters;
  result.solve_time_ms = elapsed_ms(start);
  return result;
}

SolveResult solve(const ConeProgram& program, const SolverOptions& options,
                  const WarmStart* warm) {
  const EmbeddingContext ctx(program, options);
  return ctx.solve(options, warm);
}

CertificateReport verify_certificate(const ConeProgram& program,
                                     const SolveResult& result) {
  CertificateReport report;
  if (result.status == SolveStatus::kPrimalInfeasible) {
    const std::vector<double>& eta = result.certificate;
    if (static_cast<int>(eta.size()) != program.num_constraints())
      throw std::logic_error("certificate length does not match program");
    std::vector<double> at_eta(program.num_vars());
    program.a.multiply_transpose(eta, at_eta);
    report.equality_violation = norm_inf(at_eta);
    report.cone_distance = dual_cone_distance(program.cone, eta);
    report.normalization_error = std::abs(dot(program.b, eta) + 1.0);
  } else if (result.status == SolveStatus::kDualInfeasible) {
    const std::vector<double>& nu = result.certificate;
    if (static_cast<int>(nu.size()) != program.num_vars())
      throw std::logic_error("certificate length does not match program");
    std::vector<double> a_nu(program.num_constraints());
    program.a.multiply(nu, a_nu);
    scale(-1.0, a_nu);
    report.equality_violation = 0.0;
    report.cone_distance = cone_distance(program.cone, a_nu);
    report.normalization_error = std::abs(dot(program.c, nu) + 1.0);
  } else {
    throw std::logic_error("verify_certificate requires an infeasible status");
  }
  report.max_violation = std::max(
      {report.equality_violation, report.cone_distance, report.normalization_error});
  return report;
}

}  // namespace conic
