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

#include "conic/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace conic {

using nlohmann::json;

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + message),
      line(line),
      column(column) {}

namespace {

// Line-oriented reader tracking 1-based positions for diagnostics.
class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  bool next_line(std::string* out) {
    if (!std::getline(is_, *out)) return false;
    ++line_;
    return true;
  }

  int line() const { return line_; }

  [[noreturn]] void fail(int column, const std::string& msg) const {
    throw ParseError(line_, column, msg);
  }

 private:
  std::istream& is_;
  int line_ = 0;
};

// Splits a line into whitespace tokens with their 1-based column positions.
std::vector<std::pair<std::string, int>> tokenize(const std::string& line) {
  std::vector<std::pair<std::string, int>> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    out.emplace_back(line.substr(start, i - start), static_cast<int>(start) + 1);
  }
  return out;
}

double parse_double(LineReader& reader, const std::string& tok, int col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) reader.fail(col, "trailing characters in number '" + tok + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    reader.fail(col, "expected a number, got '" + tok + "'");
  }
}

int parse_int(LineReader& reader, const std::string& tok, int col) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) reader.fail(col, "trailing characters in integer '" + tok + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    reader.fail(col, "expected an integer, got '" + tok + "'");
  }
}

std::string labeled_line(LineReader& reader, const std::string& label) {
  std::string line;
  while (reader.next_line(&line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind(label, 0) != 0)
      reader.fail(1, "expected '" + label + "' line");
    return line.substr(label.size());
  }
  reader.fail(1, "unexpected end of file, missing '" + label + "' line");
}

std::vector<double> parse_reals(LineReader& reader, const std::string& rest,
                                int col_offset, int expected,
                                const std::string& what) {
  const auto toks = tokenize(rest);
  if (static_cast<int>(toks.size()) != expected)
    reader.fail(toks.empty() ? 1 : toks.back().second + col_offset,
                what + " expects " + std::to_string(expected) + " entries, got " +
                    std::to_string(toks.size()));
  std::vector<double> out(expected);
  for (int i = 0; i < expected; ++i)
    out[i] = parse_double(reader, toks[i].first, toks[i].second + col_offset);
  return out;
}

void write_reals(std::ostream& os, const std::vector<double>& v) {
  os << std::setprecision(17);
  for (double x : v) os << " " << x;
  os << "\n";
}

}  // namespace

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << " " << a.cols() << " " << a.nnz() << "\n";
  os << std::setprecision(17);
  for (int j = 0; j < a.cols(); ++j)
    for (int p = a.col_ptr()[j]; p < a.col_ptr()[j + 1]; ++p)
      os << a.row_idx()[p] + 1 << " " << j + 1 << " " << a.values()[p] << "\n";
}

namespace {

SparseMatrix read_matrix_market_body(LineReader& reader) {
  std::string line;
  // header
  for (;;) {
    if (!reader.next_line(&line)) reader.fail(1, "missing MatrixMarket header");
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("%%MatrixMarket", 0) != 0)
      reader.fail(1, "expected '%%MatrixMarket' header");
    break;
  }
  // size line, skipping % comments
  int rows = 0, cols = 0, nnz = 0;
  for (;;) {
    if (!reader.next_line(&line)) reader.fail(1, "missing MatrixMarket size line");
    if (line.empty() || line[0] == '%' || line[0] == '#') continue;
    const auto toks = tokenize(line);
    if (toks.size() != 3)
      reader.fail(toks.empty() ? 1 : toks[0].second,
                  "size line expects 'rows cols nnz'");
    rows = parse_int(reader, toks[0].first, toks[0].second);
    cols = parse_int(reader, toks[1].first, toks[1].second);
    nnz = parse_int(reader, toks[2].first, toks[2].second);
    break;
  }
  if (rows < 0 || cols < 0 || nnz < 0)
    reader.fail(1, "negative dimension in size line");
  std::vector<Triplet> trips;
  trips.reserve(nnz);
  while (static_cast<int>(trips.size()) < nnz) {
    if (!reader.next_line(&line))
      reader.fail(1, "unexpected end of file inside coordinate block");
    if (line.empty() || line[0] == '%' || line[0] == '#') continue;
    const auto toks = tokenize(line);
    if (toks.size() != 3)
      reader.fail(toks.empty() ? 1 : toks[0].second,
                  "coordinate line expects 'row col value'");
    const int r = parse_int(reader, toks[0].first, toks[0].second);
    const int c = parse_int(reader, toks[1].first, toks[1].second);
    const double v = parse_double(reader, toks[2].first, toks[2].second);
    if (r < 1 || r > rows) reader.fail(toks[0].second, "row index out of range");
    if (c < 1 || c > cols) reader.fail(toks[1].second, "column index out of range");
    trips.push_back({r - 1, c - 1, v});
  }
  return SparseMatrix::from_triplets(rows, cols, trips);
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& is, int* line_counter) {
  LineReader reader(is);
  SparseMatrix a = read_matrix_market_body(reader);
  if (line_counter != nullptr) *line_counter = reader.line();
  return a;
}

void write_cone_program(std::ostream& os, const ConeProgram& prog) {
  prog.validate();
  os << "n: " << prog.num_vars() << "\n";
  os << "m: " << prog.num_constraints() << "\n";
  os << prog.cone.to_line() << "\n";
  os << "c:";
  write_reals(os, prog.c);
  os << "b:";
  write_reals(os, prog.b);
  write_matrix_market(os, prog.a);
}

void write_cone_program_file(const std::string& path, const ConeProgram& prog) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_cone_program(os, prog);
}

ConeProgram read_cone_program(std::istream& is) {
  LineReader reader(is);
  ConeProgram prog;

  const std::string n_rest = labeled_line(reader, "n:");
  const auto n_toks = tokenize(n_rest);
  if (n_toks.size() != 1) reader.fail(1, "'n:' expects one integer");
  const int n = parse_int(reader, n_toks[0].first, n_toks[0].second);

  const std::string m_rest = labeled_line(reader, "m:");
  const auto m_toks = tokenize(m_rest);
  if (m_toks.size() != 1) reader.fail(1, "'m:' expects one integer");
  const int m = parse_int(reader, m_toks[0].first, m_toks[0].second);
  if (n < 1 || m < 1) reader.fail(1, "dimensions must be positive");

  const std::string cone_rest = labeled_line(reader, "cones:");
  try {
    prog.cone = ConeSpec::parse_line("cones:" + cone_rest);
  } catch (const std::exception& e) {
    reader.fail(1, e.what());
  }
  if (prog.cone.dim() != m)
    reader.fail(1, "cone dimension " + std::to_string(prog.cone.dim()) +
                       " does not match m = " + std::to_string(m));

  prog.c = parse_reals(reader, labeled_line(reader, "c:"), 2, n, "'c:'");
  prog.b = parse_reals(reader, labeled_line(reader, "b:"), 2, m, "'b:'");

  prog.a = read_matrix_market_body(reader);
  if (prog.a.rows() != m || prog.a.cols() != n)
    reader.fail(1, "matrix block dimensions do not match header");
  try {
    prog.validate();
  } catch (const std::exception& e) {
    reader.fail(1, e.what());
  }
  return prog;
}

ConeProgram read_cone_program_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_cone_program(is);
}

std::string result_to_json(const SolveResult& result) {
  json j;
  j["status"] = to_string(result.status);
  j["objective"] = result.objective;
  j["residuals"] = {{"primal", result.residuals.primal},
                    {"dual", result.residuals.dual},
                    {"gap", result.residuals.gap}};
  j["iterations"] = result.iterations;
  j["time_ms"] = result.solve_time_ms;
  if (result.status == SolveStatus::kOptimal) {
    j["nu"] = result.nu;
    j["eta"] = result.eta;
    j["mu"] = result.mu;
  } else if (result.status == SolveStatus::kPrimalInfeasible ||
             result.status == SolveStatus::kDualInfeasible) {
    j["certificate"] = result.certificate;
  }
  return j.dump(2);
}

std::string instance_to_json(const NetworkInstance& inst) {
  json j;
  j["L"] = inst.shape.num_rau;
  j["K"] = inst.shape.num_user;
  j["N"] = inst.shape.antennas;
  j["P"] = inst.power_budget_w;
  j["sigma"] = inst.noise_std;
  j["gamma"] = inst.sinr_target;
  if (!inst.group_weights.empty()) j["omega"] = inst.group_weights;
  if (inst.shape.objective == StuffObjective::kGroupNorm) j["objective"] = "group";
  json chans = json::array();
  for (const auto& h : inst.channels) {
    json row = json::array();
    for (const auto& v : h) row.push_back({v.real(), v.imag()});
    chans.push_back(std::move(row));
  }
  j["channels"] = std::move(chans);
  return j.dump(2);
}

NetworkInstance instance_from_json(const std::string& text) {
  const json j = json::parse(text);
  NetworkInstance inst;
  inst.shape.num_rau = j.at("L").get<int>();
  inst.shape.num_user = j.at("K").get<int>();
  inst.shape.antennas = j.at("N").get<std::vector<int>>();
  inst.shape.objective = StuffObjective::kTotalNorm;
  if (j.contains("objective") && j.at("objective").get<std::string>() == "group")
    inst.shape.objective = StuffObjective::kGroupNorm;
  inst.power_budget_w = j.at("P").get<std::vector<double>>();
  inst.noise_std = j.at("sigma").get<std::vector<double>>();
  inst.sinr_target = j.at("gamma").get<std::vector<double>>();
  if (j.contains("omega"))
    inst.group_weights = j.at("omega").get<std::vector<double>>();
  for (const auto& row : j.at("channels")) {
    std::vector<std::complex<double>> h;
    h.reserve(row.size());
    for (const auto& pair : row) {
      if (!pair.is_array() || pair.size() != 2)
        throw std::invalid_argument("channel entries must be [re, im] pairs");
      h.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    inst.channels.push_back(std::move(h));
  }
  inst.validate();
  return inst;
}

NetworkInstance read_instance_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return instance_from_json(buf.str());
}

void write_instance_file(const std::string& path, const NetworkInstance& inst) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << instance_to_json(inst) << "\n";
}

namespace {
constexpr int kTemplateSidecarVersion = 1;
}

void save_template(const std::string& program_path,
                   const std::string& sidecar_path,
                   const StuffingTemplate& tmpl) {
  write_cone_program_file(program_path, tmpl.skeleton());
  const NetworkShape& shape = tmpl.shape();
  json j;
  j["version"] = kTemplateSidecarVersion;
  j["L"] = shape.num_rau;
  j["K"] = shape.num_user;
  j["N"] = shape.antennas;
  j["objective"] =
      shape.objective == StuffObjective::kGroupNorm ? "group" : "total";
  j["field"] = tmpl.field() == Field::kComplex ? "complex" : "real";
  json power = json::array(), noise = json::array(), weight = json::array();
  for (int l = 0; l < shape.num_rau; ++l) power.push_back(tmpl.power_slot(l));
  for (int k = 0; k < shape.num_user; ++k) noise.push_back(tmpl.noise_slot(k));
  if (shape.objective == StuffObjective::kGroupNorm)
    for (int l = 0; l < shape.num_rau; ++l) weight.push_back(tmpl.weight_slot(l));
  j["power_slots"] = std::move(power);
  j["noise_slots"] = std::move(noise);
  j["weight_slots"] = std::move(weight);
  json sinr = json::array(), chan = json::array();
  for (int k = 0; k < shape.num_user; ++k) {
    const auto s = tmpl.sinr_slots(k);
    const auto c = tmpl.channel_slots(k);
    sinr.push_back(std::vector<int>(s.begin(), s.end()));
    chan.push_back(std::vector<int>(c.begin(), c.end()));
  }
  j["sinr_slots"] = std::move(sinr);
  j["channel_slots"] = std::move(chan);
  std::ofstream os(sidecar_path);
  if (!os) throw std::runtime_error("cannot open '" + sidecar_path + "' for writing");
  os << j.dump(2) << "\n";
}

StuffingTemplate load_template(const std::string& program_path,
                               const std::string& sidecar_path) {
  ConeProgram skeleton = read_cone_program_file(program_path);
  std::ifstream is(sidecar_path);
  if (!is) throw std::runtime_error("cannot open '" + sidecar_path + "'");
  json j;
  is >> j;
  if (j.at("version").get<int>() != kTemplateSidecarVersion)
    throw std::runtime_error("unsupported template sidecar version");
  NetworkShape shape;
  shape.num_rau = j.at("L").get<int>();
  shape.num_user = j.at("K").get<int>();
  shape.antennas = j.at("N").get<std::vector<int>>();
  shape.objective = j.at("objective").get<std::string>() == "group"
                        ? StuffObjective::kGroupNorm
                        : StuffObjective::kTotalNorm;
  const Field field = j.at("field").get<std::string>() == "complex"
                          ? Field::kComplex
                          : Field::kReal;
  return StuffingTemplate::restore(
      std::move(shape), field, std::move(skeleton),
      j.at("power_slots").get<std::vector<int>>(),
      j.at("noise_slots").get<std::vector<int>>(),
      j.at("weight_slots").get<std::vector<int>>(),
      j.at("sinr_slots").get<std::vector<std::vector<int>>>(),
      j.at("channel_slots").get<std::vector<std::vector<int>>>());
}

}  // namespace conic
