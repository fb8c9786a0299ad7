// Copyright 2026 The robust_psi Authors.
//
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

// robust_psi: command-line front end.
//
//   robust_psi run <config> [--seed N] [--out runs.csv]
//   robust_psi sweep <config> [--seed N] [--out DIR] [--jobs N] [--algorithms rpsi,baseline]
//   robust_psi bound <config> [--gaps g1,g2,...] [--seed N]
//   robust_psi gen [--arms K] [--objectives M] [--seed N] [--out file.ini]
//   robust_psi ingest-check <dataset> [--normalize]
//
// Exit codes: 0 ok, 1 error, 2 run failed the success checks, 3 some sweep
// cells errored. Machine-readable output goes to stdout or --out; everything
// else goes to stderr.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "robust_psi/config.hpp"
#include "robust_psi/core.hpp"
#include "robust_psi/environment.hpp"
#include "robust_psi/errors.hpp"
#include "robust_psi/eval.hpp"
#include "robust_psi/pareto.hpp"

namespace {

using namespace robust_psi;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool quiet = false;
};

std::string join_indices(const std::vector<std::size_t>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + "}";
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_double(v[i]);
  }
  return s;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::uint64_t resolve_seed(const Globals& g, const RunConfigFile& cfg) {
  if (g.seed) return *g.seed;
  if (cfg.sweep) return cfg.sweep->base_seed;
  return 0;
}

int cmd_run(const Globals& g, const std::string& config_path) {
  const RunConfigFile cfg = load_run_config(config_path);
  const std::uint64_t seed = resolve_seed(g, cfg);
  const double eps = cfg.params.epsilon();
  const Environment env = make_instance_factory(cfg.environment)(instance_seed(seed, 0))
                              .with_attack(cfg.attack, eps)
                              .with_seed(cell_seed(seed, Algorithm::kRpsi, eps, 0));
  RunRow row = evaluate_run(Algorithm::kRpsi, cfg.params, env, cfg.max_total_samples);
  row.replication = 0;

  Output out(g.out);
  write_runs_csv(out.stream(), {row});

  if (!g.quiet) {
    std::cerr << "P      = " << join_indices(row.returned_arms) << '\n'
              << "P*     = " << join_indices(env.pareto_optimal()) << '\n'
              << "D      = " << format_double(cfg.params.bias_d()) << '\n'
              << "samples= " << row.samples << " (" << row.terminated_via << ")\n"
              << "result = " << (row.success ? "PASS" : "FAIL")
              << " (accuracy violations " << row.accuracy_violations << ", uncovered optimal "
              << row.uncovered_optimal << ")\n";
  }
  return row.success ? 0 : 2;
}

void print_aggregate_table(std::ostream& os, const ExperimentReport& report) {
  os << std::left << std::setw(10) << "algorithm" << std::right << std::setw(9) << "epsilon"
     << std::setw(8) << "RSR" << std::setw(14) << "AS" << std::setw(8) << "RO" << std::setw(8)
     << "VC" << std::setw(6) << "runs" << '\n';
  for (const auto& a : report.aggregates) {
    os << std::left << std::setw(10) << to_string(a.algorithm) << std::right << std::fixed
       << std::setw(9) << std::setprecision(3) << a.epsilon << std::setw(8) << std::setprecision(2)
       << a.rsr << std::setw(14) << std::setprecision(1) << a.as_mean << std::setw(8)
       << std::setprecision(2) << a.ro_mean << std::setw(8) << std::setprecision(2) << a.vc_mean
       << std::setw(6) << a.runs << '\n';
  }
  os.unsetf(std::ios::floatfield);
}

int cmd_sweep(const Globals& g, const std::string& config_path,
              const std::vector<std::string>& algorithms) {
  RunConfigFile cfg = load_run_config(config_path);
  if (!cfg.sweep) throw ConfigError("[sweep]: missing required section");
  if (g.seed) cfg.sweep->base_seed = *g.seed;
  if (!algorithms.empty()) {
    cfg.sweep->algorithms.clear();
    for (const auto& a : algorithms) cfg.sweep->algorithms.push_back(parse_algorithm(a));
  }
  const ExperimentReport report = run_experiment(make_sweep_spec(cfg, g.jobs));

  const std::filesystem::path dir = g.out.empty() ? std::filesystem::path(".") : std::filesystem::path(g.out);
  std::filesystem::create_directories(dir);
  {
    std::ofstream runs(dir / "runs.csv");
    std::ofstream agg(dir / "aggregate.csv");
    if (!runs || !agg) throw ConfigError("cannot write CSVs under '" + dir.string() + "'");
    write_runs_csv(runs, report.runs);
    write_aggregate_csv(agg, report.aggregates);
  }
  print_aggregate_table(std::cout, report);
  const std::size_t errored = report.errored_cells();
  if (!g.quiet) {
    std::cerr << "wrote " << (dir / "runs.csv").string() << " and "
              << (dir / "aggregate.csv").string() << '\n';
    for (const auto& r : report.runs) {
      if (!r.error.empty()) {
        std::cerr << "cell " << to_string(r.algorithm) << " eps=" << format_double(r.epsilon)
                  << " rep=" << r.replication << " errored: " << r.error << '\n';
      }
    }
  }
  return errored == 0 ? 0 : 3;
}

int cmd_bound(const Globals& g, const std::string& config_path, const std::string& gaps_text) {
  const RunConfigFile cfg = load_run_config(config_path);
  const RobustParams& p = cfg.params;

  std::vector<double> gaps;
  std::size_t m = cfg.environment.m;
  std::string gap_source;
  if (!gaps_text.empty()) {
    std::stringstream ss(gaps_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument(item);
        gaps.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError("--gaps: expected nonnegative numbers, got '" + item + "'");
      }
    }
    gap_source = "--gaps";
  } else {
    const Environment env = make_instance_factory(cfg.environment)(instance_seed(resolve_seed(g, cfg), 0));
    gaps = subopt_gaps(env.true_medians());
    m = env.objectives();
    gap_source = "generated instance";
  }
  const std::size_t k = gaps.size();
  if (k == 0) throw ConfigError("--gaps: no arms");

  const SampleBound b = theoretical_sample_bound(p, gaps, m);
  auto& os = std::cout;
  os << "K = " << k << '\n'
     << "M = " << m << '\n'
     << "h_eps = " << format_double(p.h_eps()) << '\n'
     << "beta = " << format_double(p.beta()) << '\n'
     << "delta_tilde = " << format_double(p.delta_tilde()) << '\n'
     << "D = " << format_double(p.bias_d()) << '\n'
     << "n0 = " << init_samples_n0(p, k, m) << '\n'
     << "tau_alpha = " << b.tau_alpha << '\n'
     << "gap_free_bound = " << b.gap_free << '\n'
     << "gap_dependent_bound = " << b.gap_dependent << '\n';

  const double half = 0.5 - p.epsilon();
  const double alpha = p.alpha();
  os << "asymptotic = O( 1/(1/2 - eps)^2 * K/alpha^2 * log(M K / (alpha delta_tilde)) )\n";
  if (alpha > 0.0) {
    const double value = (1.0 / (half * half)) * (static_cast<double>(k) / (alpha * alpha)) *
                         std::log(static_cast<double>(m * k) / (alpha * p.delta_tilde()));
    os << "asymptotic_instance = O( 1/" << format_double(half) << "^2 * " << k << "/"
       << format_double(alpha) << "^2 * log(" << m * k << " / (" << format_double(alpha) << " * "
       << format_double(p.delta_tilde()) << ")) ) = O(" << format_double(value) << ")\n";
  }
  if (!g.quiet) std::cerr << "gaps from " << gap_source << ": " << join_doubles(gaps) << '\n';
  return 0;
}

int cmd_gen(const Globals& g, const std::string& base_config, std::size_t k, std::size_t m) {
  std::optional<RunConfigFile> cfg;
  if (!base_config.empty()) {
    cfg = load_run_config(base_config);
  } else {
    std::istringstream defaults(
        "[params]\nepsilon = 0\ndelta = 0.1\nalpha = 0.1\nt_bar = 0.49\nsigma = 0.1\n"
        "adversary_class = prescient\n"
        "[environment]\nkind = gaussian\nK = 10\nM = 2\nmean_range = 0, 10\nsigma = 0.1\n");
    cfg = parse_run_config(defaults);
  }
  EnvironmentSection& env = cfg->environment;
  if (env.kind != EnvironmentKind::kGaussian) {
    throw ConfigError("[environment].kind: gen needs a gaussian environment");
  }
  if (k > 0) env.k = k;
  if (m > 0) env.m = m;
  env.means.clear();
  const std::uint64_t seed = resolve_seed(g, *cfg);
  const Environment inst =
      random_gaussian_instance(env.k, env.m, env.mean_low, env.mean_high, env.sigma,
                               instance_seed(seed, 0));
  for (const auto& row : inst.true_medians().rows()) env.means.push_back(row);

  Output out(g.out);
  out.stream() << render_run_config(*cfg);
  if (!g.quiet) std::cerr << "P* = " << join_indices(inst.pareto_optimal()) << '\n';
  return 0;
}

int cmd_ingest_check(const Globals& g, const std::string& path, bool normalize) {
  const EmpiricalDataset ds = read_empirical(path, normalize);
  const Environment env(ds.arms, attack::None{}, 0.0, 0);
  Output out(g.out);
  auto& os = out.stream();
  os << "arm";
  for (const auto& name : ds.objective_names) os << ',' << name;
  os << ",samples,pareto_optimal\n";
  for (std::size_t i = 0; i < ds.arms.size(); ++i) {
    os << ds.arm_names[i];
    for (double v : env.true_medians().row(i)) os << ',' << format_double(v);
    os << ',' << std::get<EmpiricalArm>(ds.arms[i]).points.size() << ','
       << (env.is_optimal(i) ? 1 : 0) << '\n';
  }
  if (!g.quiet) {
    std::cerr << "ok: " << ds.arms.size() << " arms, " << ds.objective_names.size()
              << " objectives, " << env.pareto_optimal().size() << " Pareto optimal\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust Pareto set identification under contaminated rewards"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Base seed")->envname("ROBUST_PSI_SEED");
  app.add_option("--out", g.out, "Output file (directory for sweep)");
  app.add_option("--jobs", g.jobs, "Worker threads for sweep")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Suppress human-readable output on stderr");

  std::string config;
  auto* run = app.add_subcommand("run", "Single R-PSI run");
  run->add_option("config", config, "Config file")->required();

  std::vector<std::string> algorithms;
  auto* sweep = app.add_subcommand("sweep", "Epsilon sweep with replications");
  sweep->add_option("config", config, "Config file")->required();
  sweep->add_option("--algorithms", algorithms, "Subset of rpsi,baseline")->delimiter(',');

  std::string gaps;
  auto* bound = app.add_subcommand("bound", "Theoretical sample complexity");
  bound->add_option("config", config, "Config file")->required();
  bound->add_option("--gaps", gaps, "Comma separated suboptimality gaps, one per arm");

  std::size_t gen_k = 0;
  std::size_t gen_m = 0;
  auto* gen = app.add_subcommand("gen", "Emit a config with a random Gaussian instance");
  gen->add_option("config", config, "Base config (params and mean range)");
  gen->add_option("--arms", gen_k, "Number of arms")->check(CLI::PositiveNumber);
  gen->add_option("--objectives", gen_m, "Number of objectives")->check(CLI::PositiveNumber);

  std::string dataset;
  bool normalize = false;
  auto* ingest = app.add_subcommand("ingest-check", "Validate an empirical dataset");
  ingest->add_option("dataset", dataset, "Delimited dataset file")->required();
  ingest->add_flag("--normalize", normalize, "Min-max scale each objective");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(g, config);
    if (*sweep) return cmd_sweep(g, config, algorithms);
    if (*bound) return cmd_bound(g, config, gaps);
    if (*gen) return cmd_gen(g, config, gen_k, gen_m);
    if (*ingest) return cmd_ingest_check(g, dataset, normalize);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
