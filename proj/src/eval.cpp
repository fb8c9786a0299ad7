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

#include "robust_psi/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "robust_psi/baseline.hpp"
#include "robust_psi/errors.hpp"
#include "robust_psi/seeding.hpp"

namespace robust_psi {
namespace {

constexpr std::string_view kRunsHeader =
    "algorithm,epsilon,seed,success,samples,returned_arms,optimal_returned,optimal_total,"
    "accuracy_violations,uncovered_optimal,terminated_via";
constexpr std::string_view kAggregateHeader = "algorithm,epsilon,rsr,as_mean,ro_mean,vc_mean,runs";

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
  T value{};
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DomainError(std::string("csv: bad ") + what + " '" + s + "'");
  }
  return value;
}

bool contains(const std::vector<std::size_t>& v, std::size_t x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::size_t> check_accuracy(const std::vector<std::size_t>& p,
                                        const MedianMatrix& medians, double d_bias,
                                        double alpha) {
  const auto gaps = subopt_gaps(medians);
  const double margin = SuccessCriteria::relaxed(d_bias, alpha).accuracy_margin;
  std::vector<std::size_t> violations;
  for (std::size_t i : p) {
    if (gaps.at(i) > margin) violations.push_back(i);
  }
  return violations;
}

std::vector<std::size_t> check_coverage(const std::vector<std::size_t>& p,
                                        const MedianMatrix& medians, double d_bias) {
  const double margin = SuccessCriteria::relaxed(d_bias, 0.0).coverage_margin;
  std::vector<std::size_t> uncovered;
  for (std::size_t j : pareto_front(medians)) {
    const auto& mj = medians.row(j);
    const bool covered = std::any_of(p.begin(), p.end(), [&](std::size_t i) {
      const auto& mi = medians.row(i);
      for (std::size_t d = 0; d < mj.size(); ++d) {
        if (mj[d] - mi[d] > margin) return false;
      }
      return true;
    });
    if (!covered) uncovered.push_back(j);
  }
  return uncovered;
}

std::size_t count_good_event_violations(const RunTrace& trace, const MedianMatrix& medians,
                                        double d_bias) {
  std::size_t bad = 0;
  for (const auto& est : trace.estimates) {
    const auto& truth = medians.row(est.arm);
    for (std::size_t d = 0; d < truth.size(); ++d) {
      if (std::abs(est.median[d] - truth[d]) > d_bias + est.bias) ++bad;
    }
  }
  return bad;
}

std::vector<std::string> check_run_invariants(const RunTrace& trace, std::size_t arms,
                                              std::int64_t tau_limit) {
  std::vector<std::string> issues;
  auto report = [&](std::int64_t t, const std::string& msg) {
    issues.push_back("loop " + std::to_string(t) + ": " + msg);
  };
  std::vector<std::size_t> previous(arms);
  for (std::size_t i = 0; i < arms; ++i) previous[i] = i;
  std::set<std::size_t> eliminated;
  std::int64_t sampled = trace.init_samples;

  for (const auto& snap : trace.loops) {
    sampled += snap.batch;
    if (!snap.undecided.empty()) {
      std::int64_t lo = snap.round.at(snap.undecided.front());
      std::int64_t hi = lo;
      for (std::size_t i : snap.undecided) {
        lo = std::min(lo, snap.round.at(i));
        hi = std::max(hi, snap.round.at(i));
      }
      if (hi - lo > 1) report(snap.t, "round counters over S differ by " + std::to_string(hi - lo));
    }
    for (std::size_t i : snap.undecided) {
      if (contains(snap.predicted, i)) report(snap.t, "arm " + std::to_string(i) + " in both S and P");
      if (!contains(previous, i)) report(snap.t, "arm " + std::to_string(i) + " re-entered S");
    }
    for (std::size_t i = 0; i < snap.round.size(); ++i) {
      if (snap.round[i] > tau_limit) {
        report(snap.t, "arm " + std::to_string(i) + " reached round " +
                           std::to_string(snap.round[i]) + " > " + std::to_string(tau_limit));
      }
    }
    eliminated.insert(snap.eliminated.begin(), snap.eliminated.end());
    previous = snap.undecided;
  }
  for (std::size_t i : trace.predicted) {
    if (eliminated.count(i) != 0) {
      issues.push_back("arm " + std::to_string(i) + " both eliminated and returned");
    }
  }
  std::set<std::size_t> unique(trace.predicted.begin(), trace.predicted.end());
  if (unique.size() != trace.predicted.size()) issues.push_back("P contains duplicates");
  if (sampled != trace.total_samples && trace.terminated_via != Termination::kCap) {
    issues.push_back("sample accounting: " + std::to_string(sampled) + " recorded vs " +
                     std::to_string(trace.total_samples) + " total");
  }
  return issues;
}

std::string_view to_string(Algorithm a) {
  return a == Algorithm::kRpsi ? "rpsi" : "baseline";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "rpsi") return Algorithm::kRpsi;
  if (name == "baseline") return Algorithm::kBaseline;
  throw DomainError("unknown algorithm '" + std::string(name) + "' (expected rpsi or baseline)");
}

const AggregateRow* ExperimentReport::find(Algorithm a, double epsilon) const {
  for (const auto& row : aggregates) {
    if (row.algorithm == a && row.epsilon == epsilon) return &row;
  }
  return nullptr;
}

std::size_t ExperimentReport::errored_cells() const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const RunRow& r) { return !r.error.empty(); }));
}

std::uint64_t cell_seed(std::uint64_t base_seed, Algorithm a, double epsilon,
                        std::size_t replication) {
  return combine_seed({base_seed, hash_string(to_string(a)), double_bits(epsilon),
                       static_cast<std::uint64_t>(replication)});
}

std::uint64_t instance_seed(std::uint64_t base_seed, std::size_t replication) {
  return combine_seed({base_seed, hash_string("instance"), static_cast<std::uint64_t>(replication)});
}

RunRow evaluate_run(Algorithm algorithm, const RobustParams& params, const Environment& env,
                    std::optional<std::int64_t> max_total_samples) {
  RunRow row;
  row.algorithm = algorithm;
  row.epsilon = env.epsilon();
  row.seed = env.seed();
  bool capped = false;
  if (algorithm == Algorithm::kRpsi) {
    const RpsiResult res = run_rpsi(RpsiConfig(params, max_total_samples), env);
    row.returned_arms = res.predicted;
    row.samples = res.trace.total_samples;
    row.terminated_via = std::string(to_string(res.trace.terminated_via));
    capped = res.trace.terminated_via == Termination::kCap;
  } else {
    const BaselineConfig cfg(params.alpha(), params.delta(), params.sigma(), max_total_samples);
    const BaselineResult res = run_mean_psi(cfg, env);
    row.returned_arms = res.predicted;
    row.samples = res.trace.total_samples;
    row.terminated_via = std::string(to_string(res.trace.terminated_via));
    capped = res.trace.terminated_via == Termination::kCap;
  }
  const MedianMatrix& medians = env.true_medians();
  const auto& optimal = env.pareto_optimal();
  row.optimal_total = optimal.size();
  row.optimal_returned = static_cast<std::size_t>(std::count_if(
      optimal.begin(), optimal.end(), [&](std::size_t j) { return contains(row.returned_arms, j); }));
  row.accuracy_violations =
      check_accuracy(row.returned_arms, medians, params.bias_d(), params.alpha()).size();
  row.uncovered_optimal = check_coverage(row.returned_arms, medians, params.bias_d()).size();
  row.success = !capped && row.accuracy_violations == 0 && row.uncovered_optimal == 0;
  return row;
}

AggregateRow aggregate(Algorithm a, double epsilon, const std::vector<const RunRow*>& rows) {
  AggregateRow agg;
  agg.algorithm = a;
  agg.epsilon = epsilon;
  agg.runs = rows.size();
  if (rows.empty()) return agg;
  double succ = 0.0;
  double samples = 0.0;
  double ro = 0.0;
  double vc = 0.0;
  for (const RunRow* r : rows) {
    succ += r->success ? 1.0 : 0.0;
    samples += static_cast<double>(r->samples);
    if (r->error.empty()) {
      ro += r->optimal_total == 0 ? 1.0
                                  : static_cast<double>(r->optimal_returned) /
                                        static_cast<double>(r->optimal_total);
    }
    vc += static_cast<double>(r->accuracy_violations);
  }
  const double n = static_cast<double>(rows.size());
  agg.rsr = succ / n;
  agg.as_mean = samples / n;
  agg.ro_mean = ro / n;
  agg.vc_mean = vc / n;
  return agg;
}

ExperimentReport run_experiment(const SweepSpec& spec) {
  ExperimentReport report;
  struct Cell {
    Algorithm algorithm;
    double epsilon;
    std::size_t replication;
  };
  std::vector<Cell> cells;
  for (Algorithm a : spec.algorithms) {
    for (double eps : spec.epsilons) {
      for (std::size_t r = 0; r < spec.replications; ++r) cells.push_back({a, eps, r});
    }
  }
  if (!cells.empty() && !spec.make_instance) {
    throw DomainError("run_experiment: no instance factory");
  }
  report.runs.resize(cells.size());

  auto execute = [&](std::size_t idx) {
    const Cell& c = cells[idx];
    RunRow& row = report.runs[idx];
    const std::uint64_t seed = cell_seed(spec.base_seed, c.algorithm, c.epsilon, c.replication);
    try {
      const RobustParams params(c.epsilon, spec.delta, spec.alpha, spec.t_bar, spec.sigma,
                                spec.adversary_class);
      const Environment env = spec.make_instance(instance_seed(spec.base_seed, c.replication))
                                  .with_attack(spec.attack, c.epsilon)
                                  .with_seed(seed);
      row = evaluate_run(c.algorithm, params, env, spec.max_total_samples);
    } catch (const std::exception& e) {
      row = RunRow{};
      row.algorithm = c.algorithm;
      row.epsilon = c.epsilon;
      row.seed = seed;
      row.terminated_via = "error";
      row.error = e.what();
    }
    row.replication = c.replication;
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(cells.size())));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) execute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) execute(i);
      });
    }
  }

  for (Algorithm a : spec.algorithms) {
    for (double eps : spec.epsilons) {
      std::vector<const RunRow*> rows;
      for (const auto& r : report.runs) {
        if (r.algorithm == a && r.epsilon == eps) rows.push_back(&r);
      }
      report.aggregates.push_back(aggregate(a, eps, rows));
    }
  }
  return report;
}

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& rows) {
  out << kRunsHeader << '\n';
  for (const auto& r : rows) {
    std::string arms;
    for (std::size_t i = 0; i < r.returned_arms.size(); ++i) {
      if (i) arms += ';';
      arms += std::to_string(r.returned_arms[i]);
    }
    out << to_string(r.algorithm) << ',' << format_double(r.epsilon) << ',' << r.seed << ','
        << (r.success ? 1 : 0) << ',' << r.samples << ',' << arms << ',' << r.optimal_returned
        << ',' << r.optimal_total << ',' << r.accuracy_violations << ',' << r.uncovered_optimal
        << ',' << r.terminated_via << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.algorithm) << ',' << format_double(r.epsilon) << ','
        << format_double(r.rsr) << ',' << format_double(r.as_mean) << ','
        << format_double(r.ro_mean) << ',' << format_double(r.vc_mean) << ',' << r.runs << '\n';
  }
}

std::vector<RunRow> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kRunsHeader) {
    throw DomainError("csv: unexpected per-run header");
  }
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) throw DomainError("csv: expected 11 fields in '" + line + "'");
    RunRow r;
    r.algorithm = parse_algorithm(f[0]);
    r.epsilon = parse_number<double>(f[1], "epsilon");
    r.seed = parse_number<std::uint64_t>(f[2], "seed");
    r.success = parse_number<int>(f[3], "success") != 0;
    r.samples = parse_number<std::int64_t>(f[4], "samples");
    if (!f[5].empty()) {
      for (const auto& a : split(f[5], ';')) r.returned_arms.push_back(parse_number<std::size_t>(a, "arm"));
    }
    r.optimal_returned = parse_number<std::size_t>(f[6], "optimal_returned");
    r.optimal_total = parse_number<std::size_t>(f[7], "optimal_total");
    r.accuracy_violations = parse_number<std::size_t>(f[8], "accuracy_violations");
    r.uncovered_optimal = parse_number<std::size_t>(f[9], "uncovered_optimal");
    r.terminated_via = f[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kAggregateHeader) {
    throw DomainError("csv: unexpected aggregate header");
  }
  std::vector<AggregateRow> rows;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 7) throw DomainError("csv: expected 7 fields in '" + line + "'");
    AggregateRow r;
    r.algorithm = parse_algorithm(f[0]);
    r.epsilon = parse_number<double>(f[1], "epsilon");
    r.rsr = parse_number<double>(f[2], "rsr");
    r.as_mean = parse_number<double>(f[3], "as_mean");
    r.ro_mean = parse_number<double>(f[4], "ro_mean");
    r.vc_mean = parse_number<double>(f[5], "vc_mean");
    r.runs = parse_number<std::size_t>(f[6], "runs");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace robust_psi
