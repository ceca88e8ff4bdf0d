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

#include "conic/cones.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "conic/vec.hpp"

namespace conic {

ConeSpec::ConeSpec(std::vector<ConeBlock> blocks) : blocks_(std::move(blocks)) {
  total_dim_ = 0;
  for (const ConeBlock& b : blocks_) {
    if (b.dim < 1) throw std::invalid_argument("cone block dimension must be >= 1");
    total_dim_ += b.dim;
  }
}

bool ConeSpec::operator==(const ConeSpec& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].kind != other.blocks_[i].kind ||
        blocks_[i].dim != other.blocks_[i].dim)
      return false;
  }
  return true;
}

std::string ConeSpec::to_line() const {
  int zero_dim = 0;
  int nonneg_dim = 0;
  std::vector<int> soc_dims;
  int phase = 0;  // 0 = zero, 1 = nonneg, 2 = soc
  for (const ConeBlock& b : blocks_) {
    switch (b.kind) {
      case ConeKind::kZero:
        if (phase > 0)
          throw std::invalid_argument(
              "cone encoding requires canonical z,l,q block order");
        zero_dim += b.dim;
        break;
      case ConeKind::kNonNegative:
        if (phase > 1)
          throw std::invalid_argument(
              "cone encoding requires canonical z,l,q block order");
        phase = 1;
        nonneg_dim += b.dim;
        break;
      case ConeKind::kSecondOrder:
        phase = 2;
        soc_dims.push_back(b.dim);
        break;
    }
  }
  std::ostringstream os;
  os << "cones:";
  if (zero_dim > 0) os << " z:" << zero_dim;
  if (nonneg_dim > 0) os << " l:" << nonneg_dim;
  if (!soc_dims.empty()) {
    os << " q:";
    for (std::size_t i = 0; i < soc_dims.size(); ++i) {
      if (i > 0) os << ",";
      os << soc_dims[i];
    }
  }
  return os.str();
}

ConeSpec ConeSpec::parse_line(const std::string& line) {
  std::istringstream is(line);
  std::string tok;
  is >> tok;
  if (tok != "cones:") throw std::invalid_argument("expected 'cones:' prefix");
  std::vector<ConeBlock> blocks;
  std::vector<ConeBlock> socs;
  while (is >> tok) {
    if (tok.size() < 3 || tok[1] != ':')
      throw std::invalid_argument("bad cone token '" + tok + "'");
    const char kind = tok[0];
    const std::string payload = tok.substr(2);
    if (kind == 'z' || kind == 'l') {
      const int d = std::stoi(payload);
      if (d < 1) throw std::invalid_argument("bad cone dimension in '" + tok + "'");
      blocks.push_back({kind == 'z' ? ConeKind::kZero : ConeKind::kNonNegative, d});
    } else if (kind == 'q') {
      std::istringstream dims(payload);
      std::string num;
      while (std::getline(dims, num, ',')) {
        const int d = std::stoi(num);
        if (d < 1) throw std::invalid_argument("bad soc dimension in '" + tok + "'");
        socs.push_back({ConeKind::kSecondOrder, d});
      }
    } else {
      throw std::invalid_argument("unknown cone kind '" + tok + "'");
    }
  }
  blocks.insert(blocks.end(), socs.begin(), socs.end());
  return ConeSpec(std::move(blocks));
}

void project_nonneg(std::span<const double> v, std::span<double> out) {
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? v[i] : 0.0;
}

namespace {

// In-place SOC projection on w = (y, x). Case order follows the closed form:
// ties on the boundary fall through the <= comparisons and both branches
// agree there, so no tolerance is needed. ||x|| = 0 with y < 0 lands in the
// zero case, which is the analytic limit of the scaling branch.
void soc_project_inplace(std::span<double> w) {
  const std::size_t p = w.size();
  const double y = w[0];
  double nx = 0.0;
  for (std::size_t i = 1; i < p; ++i) nx += w[i] * w[i];
  nx = std::sqrt(nx);
  if (nx <= -y) {
    for (std::size_t i = 0; i < p; ++i) w[i] = 0.0;
  } else if (nx <= y) {
    // inside the cone, identity
  } else {
    const double s = 0.5 * (1.0 + y / nx);
    w[0] = s * nx;
    for (std::size_t i = 1; i < p; ++i) w[i] *= s;
  }
}

template <bool Dual>
void project_blocks(const ConeSpec& spec, std::span<const double> v,
                    std::span<double> out) {
  if (static_cast<int>(v.size()) != spec.dim() || v.size() != out.size())
    throw std::invalid_argument("projection input length does not match cone spec");
  std::size_t offset = 0;
  for (const ConeBlock& b : spec.blocks()) {
    const std::size_t d = static_cast<std::size_t>(b.dim);
    auto in = v.subspan(offset, d);
    auto o = out.subspan(offset, d);
    switch (b.kind) {
      case ConeKind::kZero:
        if constexpr (Dual) {
          for (std::size_t i = 0; i < d; ++i) o[i] = in[i];  // dual is free
        } else {
          for (std::size_t i = 0; i < d; ++i) o[i] = 0.0;
        }
        break;
      case ConeKind::kNonNegative:
        project_nonneg(in, o);
        break;
      case ConeKind::kSecondOrder:
        for (std::size_t i = 0; i < d; ++i) o[i] = in[i];
        soc_project_inplace(o);
        break;
    }
    offset += d;
  }
}

}  // namespace

std::pair<double, std::vector<double>> project_soc(double y,
                                                   std::span<const double> x) {
  std::vector<double> w(x.size() + 1);
  w[0] = y;
  for (std::size_t i = 0; i < x.size(); ++i) w[i + 1] = x[i];
  soc_project_inplace(w);
  const double y_out = w[0];
  w.erase(w.begin());
  return {y_out, std::move(w)};
}

void project_cone(const ConeSpec& spec, std::span<const double> v,
                  std::span<double> out) {
  project_blocks<false>(spec, v, out);
}

std::vector<double> project_cone(const ConeSpec& spec,
                                 std::span<const double> v) {
  std::vector<double> out(v.size());
  project_cone(spec, v, out);
  return out;
}

void project_dual_cone(const ConeSpec& spec, std::span<const double> v,
                       std::span<double> out) {
  project_blocks<true>(spec, v, out);
}

std::vector<double> project_dual_cone(const ConeSpec& spec,
                                      std::span<const double> v) {
  std::vector<double> out(v.size());
  project_dual_cone(spec, v, out);
  return out;
}

double cone_distance(const ConeSpec& spec, std::span<const double> v) {
  std::vector<double> p = project_cone(spec, v);
  return dist2(v, p);
}

double dual_cone_distance(const ConeSpec& spec, std::span<const double> v) {
  std::vector<double> p = project_dual_cone(spec, v);
  return dist2(v, p);
}

}  // namespace conic
