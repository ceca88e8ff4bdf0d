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

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "conic/io.hpp"
#include "conic/netopt.hpp"

namespace {

using conic::BaselineScheme;
using conic::ChannelModelConfig;
using conic::Field;
using conic::NetworkShape;
using conic::PowerModelConfig;
using conic::SolveStatus;
using conic::SolverOptions;
using conic::StuffObjective;
using conic::TemplateCache;

constexpr const char* kCsvHeader =
    "# conic-splitter csv v1: seed,L,K,gamma_db|snr_db,status,objective,"
    "network_power_w,normalized_network_power,min_rate_bps_hz,iterations,"
    "modeling_ms,solving_ms,scheme";

struct Row {
  std::uint64_t seed = 0;
  int num_rau = 0;
  int num_user = 0;
  double sweep_value = 0.0;  // gamma_db or snr_db
  std::string status;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double network_power_w = std::numeric_limits<double>::quiet_NaN();
  double normalized_network_power = std::numeric_limits<double>::quiet_NaN();
  double min_rate_bps_hz = std::numeric_limits<double>::quiet_NaN();
  long iterations = 0;
  double modeling_ms = 0.0;
  double solving_ms = 0.0;
  std::string scheme;
};

void write_rows(std::ostream& os, const std::string& sweep_name,
                const std::vector<Row>& rows) {
  os << kCsvHeader << "\n";
  os << "seed,L,K," << sweep_name
     << ",status,objective,network_power_w,normalized_network_power,"
        "min_rate_bps_hz,iterations,modeling_ms,solving_ms,scheme\n";
  os << std::setprecision(12);
  for (const Row& r : rows) {
    os << r.seed << "," << r.num_rau << "," << r.num_user << ","
       << r.sweep_value << "," << r.status << "," << r.objective << ","
       << r.network_power_w << "," << r.normalized_network_power << ","
       << r.min_rate_bps_hz << "," << r.iterations << "," << r.modeling_ms
       << "," << r.solving_ms << "," << r.scheme << "\n";
  }
}

nlohmann::json rows_to_json(const std::string& sweep_name,
                            const std::vector<Row>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Row& r : rows) {
    arr.push_back({{"seed", r.seed},
                   {"L", r.num_rau},
                   {"K", r.num_user},
                   {sweep_name, r.sweep_value},
                   {"status", r.status},
                   {"objective", r.objective},
                   {"network_power_w", r.network_power_w},
                   {"normalized_network_power", r.normalized_network_power},
                   {"min_rate_bps_hz", r.min_rate_bps_hz},
                   {"iterations", r.iterations},
                   {"modeling_ms", r.modeling_ms},
                   {"solving_ms", r.solving_ms},
                   {"scheme", r.scheme}});
  }
  return arr;
}

void emit(const std::string& out_path, const std::string& format,
          const std::string& sweep_name, const std::vector<Row>& rows,
          const nlohmann::json& run_config) {
  std::ostringstream body;
  if (format == "json") {
    nlohmann::json doc;
    doc["format"] = "conic-splitter report v1";
    doc["config"] = run_config;
    doc["rows"] = rows_to_json(sweep_name, rows);
    body << doc.dump(2) << "\n";
  } else {
    write_rows(body, sweep_name, rows);
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << body.str();
  } else {
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot open '" + out_path + "'");
    os << body.str();
  }
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

int worker_count(int flag_value) {
  if (const char* env = std::getenv("CONIC_SPLITTER_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return flag_value > 0 ? flag_value : 1;
}

// Runs jobs 0..count-1 across a small pool; results keyed by index stay
// deterministic regardless of the pool size.
void run_pool(int count, int workers, const std::function<void(int)>& job) {
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

NetworkShape parse_shape(const std::string& text) {
  // "L,K,N" with one antenna count for every RAU
  int l = 0, k = 0, n = 0;
  if (std::sscanf(text.c_str(), "%d,%d,%d", &l, &k, &n) != 3 || l < 1 ||
      k < 1 || n < 1)
    throw CLI::ValidationError("--shape expects L,K,N with positive integers");
  NetworkShape shape;
  shape.num_rau = l;
  shape.num_user = k;
  shape.antennas.assign(l, n);
  return shape;
}

struct CommonArgs {
  std::string shape_text = "5,5,1";
  double gamma_db = 5.0;
  int trials = 10;
  std::uint64_t seed = 1;
  double eps = 1e-3;
  double eps_infeas = 1e-5;
  int max_iters = 20000;
  bool warm_start = true;
  bool equilibrate = true;
  int threads = 1;
  double region_half_width_m = 1500.0;
  double tx_power_w = 1.0;
  double shadowing_std_db = 8.0;
  std::string out_path;
  std::string format = "csv";

  SolverOptions solver_options() const {
    SolverOptions o;
    o.eps = eps;
    o.eps_infeas = eps_infeas;
    o.max_iters = max_iters;
    o.equilibrate = equilibrate;
    o.warm_start_probes = warm_start;
    return o;
  }

  ChannelModelConfig channel_config(std::uint64_t trial_seed) const {
    ChannelModelConfig cfg;
    cfg.seed = trial_seed;
    cfg.region_half_width_m = region_half_width_m;
    cfg.tx_power_budget_w = tx_power_w;
    cfg.shadowing_std_db = shadowing_std_db;
    cfg.sinr_target_linear = std::pow(10.0, gamma_db / 10.0);
    return cfg;
  }

  nlohmann::json to_json() const {
    return {{"shape", shape_text},
            {"gamma_db", gamma_db},
            {"trials", trials},
            {"seed", seed},
            {"eps", eps},
            {"max_iters", max_iters},
            {"equilibrate", equilibrate},
            {"warm_start", warm_start},
            {"region_half_width_m", region_half_width_m},
            {"tx_power_w", tx_power_w},
            {"shadowing_std_db", shadowing_std_db}};
  }
};

void add_common_flags(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--shape", args->shape_text, "network shape L,K,N");
  cmd->add_option("--gamma-db", args->gamma_db, "target SINR in dB");
  cmd->add_option("--trials", args->trials, "number of network realizations");
  cmd->add_option("--seed", args->seed, "base RNG seed");
  cmd->add_option("--eps", args->eps, "solver tolerance");
  cmd->add_option("--eps-infeas", args->eps_infeas, "certificate tolerance");
  cmd->add_option("--max-iters", args->max_iters, "iteration cap");
  cmd->add_flag("--warm-start,!--no-warm-start", args->warm_start,
                "warm start consecutive feasibility probes");
  cmd->add_flag("--equilibrate,!--no-equilibrate", args->equilibrate,
                "scale problem data before solving");
  cmd->add_option("--threads", args->threads,
                  "trial worker count (CONIC_SPLITTER_THREADS overrides)");
  cmd->add_option("--region", args->region_half_width_m,
                  "square region half-width in meters");
  cmd->add_option("--tx-power", args->tx_power_w, "per-RAU power budget in W");
  cmd->add_option("--shadowing-db", args->shadowing_std_db,
                  "log-normal shadowing std in dB");
  cmd->add_option("--out,-o", args->out_path, "output path (default stdout)");
  cmd->add_option("--format", args->format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

int cmd_solve(const std::string& path, const SolverOptions& options) {
  conic::ConeProgram prog;
  try {
    prog = conic::read_cone_program_file(path);
  } catch (const conic::ParseError& e) {
    std::cerr << "parse error in '" << path << "': " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  const conic::SolveResult result = conic::solve(prog, options);
  std::cout << conic::result_to_json(result) << "\n";
  switch (result.status) {
    case SolveStatus::kOptimal: return 0;
    case SolveStatus::kPrimalInfeasible: return 2;
    case SolveStatus::kDualInfeasible: return 3;
    default: return 4;
  }
}

int cmd_benchmark(const CommonArgs& args, bool rebuild_templates) {
  const NetworkShape shape = parse_shape(args.shape_text);
  TemplateCache cache;
  const auto tmpl = cache.get(shape, Field::kComplex);
  std::vector<Row> rows(args.trials);
  const SolverOptions options = args.solver_options();
  run_pool(args.trials, worker_count(args.threads), [&](int t) {
    Row& row = rows[t];
    row.seed = args.seed + t;
    row.num_rau = shape.num_rau;
    row.num_user = shape.num_user;
    row.sweep_value = args.gamma_db;
    const auto inst =
        conic::generate_network(args.channel_config(row.seed), shape);
    conic::ConeProgram prog;
    const double t0 = now_ms();
    if (rebuild_templates) {
      const auto fresh = conic::StuffingTemplate::build(shape, Field::kComplex);
      prog = fresh.stuff(inst);
    } else {
      prog = tmpl->stuff(inst);
    }
    row.modeling_ms = now_ms() - t0;
    const double t1 = now_ms();
    const auto res = conic::solve(prog, options);
    row.solving_ms = now_ms() - t1;
    row.status = conic::to_string(res.status);
    row.objective = res.objective;
    row.iterations = res.iterations;
  });
  emit(args.out_path, args.format, "gamma_db", rows, args.to_json());
  return 0;
}

int cmd_experiment_feasibility(const CommonArgs& args,
                               const std::vector<double>& gamma_db_list) {
  const NetworkShape shape = parse_shape(args.shape_text);
  TemplateCache cache;
  cache.get(shape, Field::kComplex);  // shared pre-generation
  const SolverOptions options = args.solver_options();
  const int per_gamma = args.trials;
  const int total = per_gamma * static_cast<int>(gamma_db_list.size());
  std::vector<Row> rows(total);
  run_pool(total, worker_count(args.threads), [&](int idx) {
    const int gi = idx / per_gamma;
    const int t = idx % per_gamma;
    Row& row = rows[idx];
    row.seed = args.seed + t;
    row.num_rau = shape.num_rau;
    row.num_user = shape.num_user;
    row.sweep_value = gamma_db_list[gi];
    ChannelModelConfig cfg = args.channel_config(row.seed);
    cfg.sinr_target_linear = std::pow(10.0, gamma_db_list[gi] / 10.0);
    const auto inst = conic::generate_network(cfg, shape);
    const double t1 = now_ms();
    try {
      const auto out = conic::min_power(inst, cache, options);
      row.status = conic::to_string(out.status);
      if (out.solution) {
        row.objective = out.raw.objective;
        row.network_power_w = out.solution->total_transmit_power_w;
      }
      row.iterations = out.raw.iterations;
    } catch (const conic::SolverStatusError& e) {
      row.status = conic::to_string(e.status);
    }
    row.solving_ms = now_ms() - t1;
  });
  // probability summary per target
  for (std::size_t gi = 0; gi < gamma_db_list.size(); ++gi) {
    int feasible = 0;
    for (int t = 0; t < per_gamma; ++t)
      if (rows[gi * per_gamma + t].status == "Optimal") ++feasible;
    Row summary;
    summary.seed = args.seed;
    summary.num_rau = shape.num_rau;
    summary.num_user = shape.num_user;
    summary.sweep_value = gamma_db_list[gi];
    summary.status = "Summary";
    summary.objective = static_cast<double>(feasible) / per_gamma;
    rows.push_back(summary);
  }
  emit(args.out_path, args.format, "gamma_db", rows, args.to_json());
  return 0;
}

int cmd_experiment_network_power(const CommonArgs& args,
                                 const std::vector<double>& gamma_db_list,
                                 const PowerModelConfig& power_cfg) {
  const NetworkShape shape = parse_shape(args.shape_text);
  TemplateCache cache;
  const SolverOptions options = args.solver_options();
  const int per_gamma = args.trials;
  const int total = per_gamma * static_cast<int>(gamma_db_list.size());
  std::vector<Row> rows(total);
  run_pool(total, worker_count(args.threads), [&](int idx) {
    const int gi = idx / per_gamma;
    const int t = idx % per_gamma;
    Row& row = rows[idx];
    row.seed = args.seed + t;
    row.num_rau = shape.num_rau;
    row.num_user = shape.num_user;
    row.sweep_value = gamma_db_list[gi];
    ChannelModelConfig cfg = args.channel_config(row.seed);
    cfg.sinr_target_linear = std::pow(10.0, gamma_db_list[gi] / 10.0);
    const auto inst = conic::generate_network(cfg, shape);
    const double t1 = now_ms();
    try {
      const auto out =
          conic::group_sparse_beamforming(inst, power_cfg, cache, options);
      if (out.feasible) {
        row.status = "Optimal";
        row.objective = out.solution->total_transmit_power_w;
        row.network_power_w = out.network_power_w;
        row.normalized_network_power = out.normalized_network_power;
      } else {
        row.status = "PrimalInfeasible";
      }
    } catch (const conic::SolverStatusError& e) {
      row.status = conic::to_string(e.status);
    }
    row.solving_ms = now_ms() - t1;
  });
  emit(args.out_path, args.format, "gamma_db", rows, args.to_json());
  return 0;
}

int cmd_experiment_maxmin(const CommonArgs& args,
                          const std::vector<double>& snr_db_list,
                          double bisection_tol) {
  const NetworkShape shape = parse_shape(args.shape_text);
  TemplateCache cache;
  const SolverOptions options = args.solver_options();
  struct Job {
    int snr_index;
    int trial;
    int scheme;  // 0 = optimal, 1..3 = baselines
  };
  std::vector<Job> jobs;
  for (std::size_t si = 0; si < snr_db_list.size(); ++si)
    for (int t = 0; t < args.trials; ++t)
      for (int s = 0; s < 4; ++s)
        jobs.push_back({static_cast<int>(si), t, s});
  std::vector<Row> rows(jobs.size());
  run_pool(static_cast<int>(jobs.size()), worker_count(args.threads),
           [&](int idx) {
             const Job& job = jobs[idx];
             Row& row = rows[idx];
             row.seed = args.seed + job.trial;
             row.num_rau = shape.num_rau;
             row.num_user = shape.num_user;
             row.sweep_value = snr_db_list[job.snr_index];
             ChannelModelConfig cfg = args.channel_config(row.seed);
             // SNR = total transmit power over per-user noise power (= 1 in
             // noise-normalized units), split evenly across RAUs.
             cfg.tx_power_budget_w =
                 std::pow(10.0, snr_db_list[job.snr_index] / 10.0) /
                 shape.num_rau;
             const auto inst = conic::generate_network(cfg, shape);
             const double t1 = now_ms();
             try {
               conic::MaxMinResult res;
               if (job.scheme == 0) {
                 row.scheme = "optimal";
                 res = conic::max_min_rate(inst, cache, bisection_tol, 0.0,
                                           options);
               } else {
                 const BaselineScheme scheme =
                     job.scheme == 1   ? BaselineScheme::kZfbf
                     : job.scheme == 2 ? BaselineScheme::kRzf
                                       : BaselineScheme::kMrt;
                 row.scheme = conic::to_string(scheme);
                 res = conic::baseline_max_min(inst, scheme, bisection_tol, 0.0,
                                               options);
               }
               row.status = "Optimal";
               row.objective = res.sinr;
               row.min_rate_bps_hz = res.min_rate_bps_hz;
               row.iterations = static_cast<long>(res.trace.size());
             } catch (const std::exception& e) {
               row.status = std::string("Error: ") + e.what();
             }
             row.solving_ms = now_ms() - t1;
           });
  emit(args.out_path, args.format, "snr_db", rows, args.to_json());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Second-order cone toolkit: matrix stuffing plus an operator-splitting "
      "solver for the homogeneous self-dual embedding"};
  app.require_subcommand(1);

  // solve
  std::string solve_path;
  CommonArgs solve_args;
  solve_args.equilibrate = false;  // raw solves follow the solver defaults
  auto* solve_cmd = app.add_subcommand("solve", "solve a cone-program file");
  solve_cmd->add_option("file", solve_path, "cone-program file")->required();
  solve_cmd->add_option("--eps", solve_args.eps, "solver tolerance");
  solve_cmd->add_option("--eps-infeas", solve_args.eps_infeas,
                        "certificate tolerance");
  solve_cmd->add_option("--max-iters", solve_args.max_iters, "iteration cap");
  solve_cmd->add_flag("--equilibrate,!--no-equilibrate",
                      solve_args.equilibrate, "scale data before solving");

  // stuff
  std::string stuff_in, stuff_out;
  bool stuff_group = false;
  auto* stuff_cmd = app.add_subcommand(
      "stuff", "stuff an instance JSON into a cone-program file");
  stuff_cmd->add_option("instance", stuff_in, "instance JSON path")->required();
  stuff_cmd->add_option("--out,-o", stuff_out, "cone-program output path")
      ->required();
  stuff_cmd->add_flag("--group-norm", stuff_group,
                      "use the group-sparse objective");

  // gen-template
  std::string tmpl_shape = "5,5,1";
  std::string tmpl_prog_out, tmpl_sidecar_out;
  bool tmpl_group = false;
  auto* tmpl_cmd = app.add_subcommand(
      "gen-template", "pre-generate a stuffing template and persist it");
  tmpl_cmd->add_option("--shape", tmpl_shape, "network shape L,K,N");
  tmpl_cmd->add_option("--out", tmpl_prog_out, "skeleton program path")
      ->required();
  tmpl_cmd->add_option("--sidecar", tmpl_sidecar_out, "index-map sidecar path")
      ->required();
  tmpl_cmd->add_flag("--group-norm", tmpl_group, "group-sparse objective");

  // benchmark
  CommonArgs bench_args;
  bool rebuild_templates = false;
  auto* bench_cmd =
      app.add_subcommand("benchmark", "per-trial modeling/solving times");
  add_common_flags(bench_cmd, &bench_args);
  bench_cmd->add_flag("--rebuild-templates", rebuild_templates,
                      "regenerate the template every trial instead of stuffing");

  // experiment
  CommonArgs exp_args;
  std::string exp_kind;
  std::vector<double> gamma_db_list = {0, 2, 4, 6, 8, 10};
  std::vector<double> snr_db_list = {-10, 0, 10, 20, 30};
  double bisection_tol = 0.01;
  PowerModelConfig power_cfg;
  auto* exp_cmd = app.add_subcommand("experiment", "network experiment suites");
  exp_cmd
      ->add_option("kind", exp_kind,
                   "feasibility_sweep, network_power or maxmin")
      ->required()
      ->check(CLI::IsMember({"feasibility_sweep", "network_power", "maxmin"}));
  add_common_flags(exp_cmd, &exp_args);
  exp_cmd->add_option("--gamma-db-list", gamma_db_list,
                      "target SINR grid in dB");
  exp_cmd->add_option("--snr-db-list", snr_db_list, "transmit SNR grid in dB");
  exp_cmd->add_option("--bisection-tol", bisection_tol,
                      "max-min bisection tolerance in linear SINR");
  exp_cmd->add_option("--fronthaul-power", power_cfg.fronthaul_link_power_w,
                      "fronthaul link power per active RAU in W");
  exp_cmd->add_option("--amplifier-efficiency", power_cfg.amplifier_efficiency,
                      "power amplifier efficiency in (0, 1]");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      return cmd_solve(solve_path, solve_args.solver_options());
    }
    if (stuff_cmd->parsed()) {
      auto inst = conic::read_instance_file(stuff_in);
      inst.shape.objective =
          stuff_group ? StuffObjective::kGroupNorm : StuffObjective::kTotalNorm;
      const auto tmpl =
          conic::StuffingTemplate::build(inst.shape, Field::kComplex);
      conic::write_cone_program_file(stuff_out, tmpl.stuff(inst));
      return 0;
    }
    if (tmpl_cmd->parsed()) {
      NetworkShape shape = parse_shape(tmpl_shape);
      shape.objective =
          tmpl_group ? StuffObjective::kGroupNorm : StuffObjective::kTotalNorm;
      const auto tmpl = conic::StuffingTemplate::build(shape, Field::kComplex);
      conic::save_template(tmpl_prog_out, tmpl_sidecar_out, tmpl);
      return 0;
    }
    if (bench_cmd->parsed()) {
      return cmd_benchmark(bench_args, rebuild_templates);
    }
    if (exp_cmd->parsed()) {
      if (exp_kind == "feasibility_sweep")
        return cmd_experiment_feasibility(exp_args, gamma_db_list);
      if (exp_kind == "network_power")
        return cmd_experiment_network_power(exp_args, gamma_db_list, power_cfg);
      return cmd_experiment_maxmin(exp_args, snr_db_list, bisection_tol);
    }
  } catch (const conic::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
