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

#include "conic/stuffing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace conic {

int NetworkShape::total_antennas() const {
  int n = 0;
  for (int a : antennas) n += a;
  return n;
}

int NetworkShape::antenna_offset(int rau) const {
  int off = 0;
  for (int l = 0; l < rau; ++l) off += antennas[l];
  return off;
}

void NetworkShape::validate() const {
  if (num_rau < 1 || num_user < 1)
    throw std::invalid_argument("network shape needs at least one RAU and one user");
  if (static_cast<int>(antennas.size()) != num_rau)
    throw std::invalid_argument("antenna list length does not match RAU count");
  for (int a : antennas)
    if (a < 1) throw std::invalid_argument("antenna counts must be >= 1");
}

bool NetworkShape::operator==(const NetworkShape& other) const {
  return num_rau == other.num_rau && num_user == other.num_user &&
         antennas == other.antennas && objective == other.objective;
}

void NetworkInstance::validate(bool allow_zero_power) const {
  shape.validate();
  const int n = shape.total_antennas();
  if (static_cast<int>(channels.size()) != shape.num_user)
    throw std::invalid_argument("channel list length does not match user count");
  for (const auto& h : channels)
    if (static_cast<int>(h.size()) != n)
      throw std::invalid_argument("channel vector length does not match antenna total");
  if (static_cast<int>(power_budget_w.size()) != shape.num_rau ||
      static_cast<int>(noise_std.size()) != shape.num_user ||
      static_cast<int>(sinr_target.size()) != shape.num_user)
    throw std::invalid_argument("instance parameter vector has wrong length");
  for (double p : power_budget_w) {
    if (!(allow_zero_power ? p >= 0.0 : p > 0.0))
      throw std::invalid_argument("power budgets must be positive");
  }
  for (double s : noise_std)
    if (!(s > 0.0)) throw std::invalid_argument("noise std must be positive");
  for (double g : sinr_target)
    if (!(g > 0.0)) throw std::invalid_argument("SINR targets must be positive");
  if (!group_weights.empty() &&
      static_cast<int>(group_weights.size()) != shape.num_rau)
    throw std::invalid_argument("group weight list length does not match RAU count");
  for (double w : group_weights)
    if (!(w > 0.0)) throw std::invalid_argument("group weights must be positive");
}

ComplexLift complex_to_real(std::span<const std::complex<double>> h) {
  const std::size_t n = h.size();
  ComplexLift lift;
  lift.real_part_row.resize(2 * n);
  lift.imag_part_row.resize(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    lift.real_part_row[j] = h[j].real();
    lift.real_part_row[n + j] = h[j].imag();
    lift.imag_part_row[j] = -h[j].imag();
    lift.imag_part_row[n + j] = h[j].real();
  }
  return lift;
}

namespace {

int csc_index(const SparseMatrix& a, int row, int col) {
  const auto& cp = a.col_ptr();
  const auto& ri = a.row_idx();
  const auto begin = ri.begin() + cp[col];
  const auto end = ri.begin() + cp[col + 1];
  const auto it = std::lower_bound(begin, end, row);
  if (it == end || *it != row)
    throw std::logic_error("template slot missing from pattern");
  return static_cast<int>(it - ri.begin());
}

double beta_of(double gamma) { return std::sqrt(1.0 + 1.0 / gamma); }

}  // namespace

StuffingTemplate StuffingTemplate::build(const NetworkShape& shape, Field field) {
  shape.validate();
  const int num_rau = shape.num_rau;
  const int num_user = shape.num_user;
  const int n_ant = shape.total_antennas();
  const int f = field == Field::kComplex ? 2 : 1;
  const int user_block = f * n_ant;
  const int v_dim = user_block * num_user;
  const bool group = shape.objective == StuffObjective::kGroupNorm;

  StuffingTemplate tmpl;
  tmpl.shape_ = shape;
  tmpl.field_ = field;

  const int num_epigraph = group ? num_rau : 1;
  const int n = num_epigraph + num_rau + num_user + v_dim;
  const int v_start = num_epigraph + num_rau + num_user;
  auto var_y0 = [&](int l) { return num_epigraph + l; };
  auto var_t0 = [&](int k) { return num_epigraph + num_rau + k; };
  auto v_col = [&](int user, int comp, int part) {
    return v_start + user * user_block + part * n_ant + comp;
  };

  std::vector<ConeBlock> cones;
  std::vector<Triplet> trips;
  std::vector<double> b;
  int row = 0;

  // Power budget rows: y0_l <= sqrt(P_l).
  for (int l = 0; l < num_rau; ++l) {
    trips.push_back({row, var_y0(l), 1.0});
    b.push_back(1.0);  // sqrt(P_l) slot
    cones.push_back({ConeKind::kSecondOrder, 1});
    ++row;
  }
  // SINR rows: t0_k <= beta_k * Re(h_k^H v_k).
  for (int k = 0; k < num_user; ++k) {
    trips.push_back({row, var_t0(k), 1.0});
    for (int part = 0; part < f; ++part)
      for (int j = 0; j < n_ant; ++j)
        trips.push_back({row, v_col(k, j, part), 1.0});  // channel slots
    b.push_back(0.0);
    cones.push_back({ConeKind::kSecondOrder, 1});
    ++row;
  }
  // Per-RAU selector rows in user-major order: all users' RAU-l components.
  auto emit_selector_block = [&](int epigraph_var, int l) {
    trips.push_back({row, epigraph_var, -1.0});
    b.push_back(0.0);
    ++row;
    const int off = shape.antenna_offset(l);
    for (int i = 0; i < num_user; ++i) {
      for (int part = 0; part < f; ++part) {
        for (int j = 0; j < shape.antennas[l]; ++j) {
          trips.push_back({row, v_col(i, off + j, part), -1.0});
          b.push_back(0.0);
          ++row;
        }
      }
    }
    cones.push_back({ConeKind::kSecondOrder, f * num_user * shape.antennas[l] + 1});
  };
  // Objective epigraph block(s): ||v|| <= x0, or ||v_l|| <= x0_l per group.
  if (group) {
    for (int l = 0; l < num_rau; ++l) emit_selector_block(l, l);
  } else {
    trips.push_back({row, 0, -1.0});
    b.push_back(0.0);
    ++row;
    for (int t = 0; t < v_dim; ++t) {
      trips.push_back({row, v_start + t, -1.0});
      b.push_back(0.0);
      ++row;
    }
    cones.push_back({ConeKind::kSecondOrder, v_dim + 1});
  }
  // Per-RAU power cones: ||v_l|| <= y0_l.
  for (int l = 0; l < num_rau; ++l) emit_selector_block(var_y0(l), l);
  // Per-user QoS cones: ||(h_k^H v_i for all i, sigma_k)|| <= t0_k.
  for (int k = 0; k < num_user; ++k) {
    trips.push_back({row, var_t0(k), -1.0});
    b.push_back(0.0);
    ++row;
    for (int i = 0; i < num_user; ++i) {
      for (int part = 0; part < f; ++part) {
        for (int inner = 0; inner < f; ++inner)
          for (int j = 0; j < n_ant; ++j)
            trips.push_back({row, v_col(i, j, inner), 1.0});  // channel slots
        b.push_back(0.0);
        ++row;
      }
    }
    b.push_back(1.0);  // sigma_k slot, all-zero A row
    ++row;
    cones.push_back({ConeKind::kSecondOrder, f * num_user + 2});
  }
  const int m = row;

  std::vector<double> c(n, 0.0);
  if (group) {
    for (int l = 0; l < num_rau; ++l) c[l] = 1.0;  // omega_l slots
  } else {
    c[0] = 1.0;
  }

  tmpl.skeleton_.a = SparseMatrix::from_triplets(m, n, trips);
  tmpl.skeleton_.b = std::move(b);
  tmpl.skeleton_.c = std::move(c);
  tmpl.skeleton_.cone = ConeSpec(std::move(cones));
  tmpl.skeleton_.validate();

  // Resolve slot positions in the frozen pattern.
  const SparseMatrix& a = tmpl.skeleton_.a;
  tmpl.power_slots_.resize(num_rau);
  for (int l = 0; l < num_rau; ++l) tmpl.power_slots_[l] = l;
  if (group) {
    tmpl.weight_slots_.resize(num_rau);
    for (int l = 0; l < num_rau; ++l) tmpl.weight_slots_[l] = l;
  }
  int selector_rows = 0;  // rows of one full set of per-RAU selector blocks
  for (int l = 0; l < num_rau; ++l)
    selector_rows += f * num_user * shape.antennas[l] + 1;
  const int objective_rows = group ? selector_rows : v_dim + 1;
  const int qos_start = num_rau + num_user + objective_rows + selector_rows;
  tmpl.noise_slots_.resize(num_user);
  tmpl.sinr_slots_.resize(num_user);
  tmpl.channel_slots_.resize(num_user);
  const int qos_block = f * num_user + 2;
  for (int k = 0; k < num_user; ++k) {
    tmpl.noise_slots_[k] = qos_start + k * qos_block + qos_block - 1;
    auto& sinr = tmpl.sinr_slots_[k];
    sinr.reserve(f * n_ant);
    for (int part = 0; part < f; ++part)
      for (int j = 0; j < n_ant; ++j)
        sinr.push_back(csc_index(a, num_rau + k, v_col(k, j, part)));
    auto& chan = tmpl.channel_slots_[k];
    chan.reserve(f * f * n_ant * num_user);
    for (int i = 0; i < num_user; ++i) {
      for (int part = 0; part < f; ++part) {
        const int r = qos_start + k * qos_block + 1 + i * f + part;
        for (int inner = 0; inner < f; ++inner)
          for (int j = 0; j < n_ant; ++j)
            chan.push_back(csc_index(a, r, v_col(i, j, inner)));
      }
    }
  }
  return tmpl;
}

StuffingTemplate StuffingTemplate::restore(
    NetworkShape shape, Field field, ConeProgram skeleton,
    std::vector<int> power_slots, std::vector<int> noise_slots,
    std::vector<int> weight_slots, std::vector<std::vector<int>> sinr_slots,
    std::vector<std::vector<int>> channel_slots) {
  shape.validate();
  skeleton.validate();
  const int f = field == Field::kComplex ? 2 : 1;
  const int n_ant = shape.total_antennas();
  const bool group = shape.objective == StuffObjective::kGroupNorm;
  if (static_cast<int>(power_slots.size()) != shape.num_rau ||
      static_cast<int>(noise_slots.size()) != shape.num_user ||
      static_cast<int>(sinr_slots.size()) != shape.num_user ||
      static_cast<int>(channel_slots.size()) != shape.num_user ||
      static_cast<int>(weight_slots.size()) != (group ? shape.num_rau : 0))
    throw std::invalid_argument("template slot maps have wrong cardinality");
  const int m = skeleton.num_constraints();
  const int nnz = skeleton.a.nnz();
  for (int s : power_slots)
    if (s < 0 || s >= m) throw std::invalid_argument("power slot out of range");
  for (int s : noise_slots)
    if (s < 0 || s >= m) throw std::invalid_argument("noise slot out of range");
  for (int s : weight_slots)
    if (s < 0 || s >= skeleton.num_vars())
      throw std::invalid_argument("weight slot out of range");
  for (const auto& slots : sinr_slots) {
    if (static_cast<int>(slots.size()) != f * n_ant)
      throw std::invalid_argument("SINR slot list has wrong length");
    for (int s : slots)
      if (s < 0 || s >= nnz) throw std::invalid_argument("SINR slot out of range");
  }
  for (const auto& slots : channel_slots) {
    if (static_cast<int>(slots.size()) != f * f * n_ant * shape.num_user)
      throw std::invalid_argument("channel slot list has wrong length");
    for (int s : slots)
      if (s < 0 || s >= nnz)
        throw std::invalid_argument("channel slot out of range");
  }
  StuffingTemplate tmpl;
  tmpl.shape_ = std::move(shape);
  tmpl.field_ = field;
  tmpl.skeleton_ = std::move(skeleton);
  tmpl.power_slots_ = std::move(power_slots);
  tmpl.noise_slots_ = std::move(noise_slots);
  tmpl.weight_slots_ = std::move(weight_slots);
  tmpl.sinr_slots_ = std::move(sinr_slots);
  tmpl.channel_slots_ = std::move(channel_slots);
  return tmpl;
}

int StuffingTemplate::var_epigraph(int group) const {
  const bool grouped = shape_.objective == StuffObjective::kGroupNorm;
  if (!grouped && group != 0)
    throw std::invalid_argument("total-norm template has a single epigraph scalar");
  return group;
}

int StuffingTemplate::var_y0(int rau) const {
  const int num_epigraph =
      shape_.objective == StuffObjective::kGroupNorm ? shape_.num_rau : 1;
  return num_epigraph + rau;
}

int StuffingTemplate::var_t0(int user) const {
  const int num_epigraph =
      shape_.objective == StuffObjective::kGroupNorm ? shape_.num_rau : 1;
  return num_epigraph + shape_.num_rau + user;
}

int StuffingTemplate::var_v_start() const {
  const int num_epigraph =
      shape_.objective == StuffObjective::kGroupNorm ? shape_.num_rau : 1;
  return num_epigraph + shape_.num_rau + shape_.num_user;
}

int StuffingTemplate::v_dim() const {
  return user_block_dim() * shape_.num_user;
}

int StuffingTemplate::user_block_dim() const {
  return lift_factor() * shape_.total_antennas();
}

int StuffingTemplate::power_slot(int rau) const { return power_slots_[rau]; }
int StuffingTemplate::noise_slot(int user) const { return noise_slots_[user]; }

int StuffingTemplate::weight_slot(int group) const {
  if (weight_slots_.empty())
    throw std::logic_error("weight slots exist only for the GroupNorm objective");
  return weight_slots_[group];
}

std::span<const int> StuffingTemplate::sinr_slots(int user) const {
  return sinr_slots_[user];
}

std::span<const int> StuffingTemplate::channel_slots(int user) const {
  return channel_slots_[user];
}

ConeProgram StuffingTemplate::stuff(const NetworkInstance& inst) const {
  ConeProgram prog = skeleton_;
  stuff_into(inst, prog);
  return prog;
}

void StuffingTemplate::stuff_into(const NetworkInstance& inst,
                                  ConeProgram& prog) const {
  inst.validate(/*allow_zero_power=*/true);
  if (!(inst.shape == shape_))
    throw std::invalid_argument("instance shape does not match template");
  if (prog.a.nnz() != skeleton_.a.nnz() ||
      prog.a.rows() != skeleton_.a.rows() || prog.a.cols() != skeleton_.a.cols())
    throw std::invalid_argument("program pattern does not match template");
  const int n_ant = shape_.total_antennas();
  const int f = lift_factor();
  if (field_ == Field::kReal) {
    for (const auto& h : inst.channels)
      for (const std::complex<double>& v : h)
        if (v.imag() != 0.0)
          throw std::invalid_argument(
              "real-field template requires real-valued channels");
  }

  std::vector<double>& av = prog.a.mutable_values();
  for (int l = 0; l < shape_.num_rau; ++l)
    prog.b[power_slots_[l]] = std::sqrt(inst.power_budget_w[l]);
  for (int k = 0; k < shape_.num_user; ++k)
    prog.b[noise_slots_[k]] = inst.noise_std[k];
  if (!weight_slots_.empty()) {
    for (int l = 0; l < shape_.num_rau; ++l)
      prog.c[weight_slots_[l]] =
          inst.group_weights.empty() ? 1.0 : inst.group_weights[l];
  }

  for (int k = 0; k < shape_.num_user; ++k) {
    const auto& h = inst.channels[k];
    const double beta = beta_of(inst.sinr_target[k]);
    const auto& sinr = sinr_slots_[k];
    // SINR row carries -beta_k times the real-part lift row of h_k.
    int pos = 0;
    for (int j = 0; j < n_ant; ++j) av[sinr[pos++]] = -beta * h[j].real();
    if (f == 2)
      for (int j = 0; j < n_ant; ++j) av[sinr[pos++]] = -beta * h[j].imag();
    // QoS block rows carry -C_k: the lift rows of h_k repeated per user.
    const auto& chan = channel_slots_[k];
    pos = 0;
    for (int i = 0; i < shape_.num_user; ++i) {
      for (int j = 0; j < n_ant; ++j) av[chan[pos++]] = -h[j].real();
      if (f == 2) {
        for (int j = 0; j < n_ant; ++j) av[chan[pos++]] = -h[j].imag();
        for (int j = 0; j < n_ant; ++j) av[chan[pos++]] = h[j].imag();
        for (int j = 0; j < n_ant; ++j) av[chan[pos++]] = -h[j].real();
      }
    }
  }
}

ConeProgram stuff(const StuffingTemplate& tmpl, const NetworkInstance& inst) {
  return tmpl.stuff(inst);
}

BeamformingSolution evaluate_beamformers(
    const NetworkInstance& inst,
    const std::vector<std::vector<std::complex<double>>>& v) {
  const NetworkShape& shape = inst.shape;
  const int num_rau = shape.num_rau;
  const int num_user = shape.num_user;
  const int n_ant = shape.total_antennas();

  BeamformingSolution sol;
  sol.beamformers.assign(num_rau, {});
  sol.rau_power_w.assign(num_rau, 0.0);
  sol.group_norms.assign(num_rau, 0.0);
  for (int l = 0; l < num_rau; ++l) {
    const int off = shape.antenna_offset(l);
    sol.beamformers[l].resize(num_user);
    double p = 0.0;
    for (int k = 0; k < num_user; ++k) {
      auto& vlk = sol.beamformers[l][k];
      vlk.assign(v[k].begin() + off, v[k].begin() + off + shape.antennas[l]);
      for (const auto& x : vlk) p += std::norm(x);
    }
    sol.rau_power_w[l] = p;
    sol.group_norms[l] = std::sqrt(p);
    sol.total_transmit_power_w += p;
  }

  sol.achieved_sinr.assign(num_user, 0.0);
  for (int k = 0; k < num_user; ++k) {
    const auto& h = inst.channels[k];
    double signal = 0.0;
    double interference = 0.0;
    for (int i = 0; i < num_user; ++i) {
      std::complex<double> g = 0.0;
      for (int j = 0; j < n_ant; ++j) g += std::conj(h[j]) * v[i][j];
      if (i == k)
        signal = std::norm(g);
      else
        interference += std::norm(g);
    }
    const double sigma2 = inst.noise_std[k] * inst.noise_std[k];
    sol.achieved_sinr[k] = signal / (interference + sigma2);
  }
  return sol;
}

BeamformingSolution recover_beamformers(const StuffingTemplate& tmpl,
                                        const NetworkInstance& inst,
                                        const SolveResult& result) {
  if (result.status != SolveStatus::kOptimal)
    throw std::logic_error("recover_beamformers requires an Optimal result");
  const NetworkShape& shape = tmpl.shape();
  const int num_user = shape.num_user;
  const int n_ant = shape.total_antennas();
  const bool complex_field = tmpl.field() == Field::kComplex;
  const int v_start = tmpl.var_v_start();
  const int block = tmpl.user_block_dim();

  std::vector<std::vector<std::complex<double>>> v(num_user);
  for (int k = 0; k < num_user; ++k) {
    v[k].resize(n_ant);
    for (int j = 0; j < n_ant; ++j) {
      const double re = result.nu[v_start + k * block + j];
      const double im =
          complex_field ? result.nu[v_start + k * block + n_ant + j] : 0.0;
      v[k][j] = {re, im};
    }
  }
  BeamformingSolution sol = evaluate_beamformers(inst, v);
  sol.cone_objective = result.objective;
  return sol;
}

std::shared_ptr<const StuffingTemplate> TemplateCache::get(
    const NetworkShape& shape, Field field) {
  std::ostringstream key;
  key << shape.num_rau << "," << shape.num_user << ",";
  for (int a : shape.antennas) key << a << "-";
  key << "," << static_cast<int>(shape.objective) << ","
      << static_cast<int>(field);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(key.str());
  if (it != cache_.end()) return it->second;
  auto tmpl =
      std::make_shared<const StuffingTemplate>(StuffingTemplate::build(shape, field));
  cache_.emplace(key.str(), tmpl);
  return tmpl;
}

}  // namespace conic
