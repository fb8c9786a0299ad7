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

#pragma once

// Ground-truth success checks and the experiment sweep driver.
//
// A returned set P passes when
//   accuracy:  every i in P has suboptimality gap <= 2D + alpha, and
//   coverage:  every Pareto-optimal j has some i in P with m_j - m_i <= 2D.
// Both algorithms are judged with the same D, derived from the run's
// robust parameters.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robust_psi/core.hpp"
#include "robust_psi/environment.hpp"
#include "robust_psi/pareto.hpp"
#include "robust_psi/rpsi.hpp"

namespace robust_psi {

struct SuccessCriteria {
  double accuracy_margin;  // 2D + alpha
  double coverage_margin;  // 2D

  static SuccessCriteria relaxed(double d_bias, double alpha) {
    return {2.0 * d_bias + alpha, 2.0 * d_bias};
  }
};

// Arms of P whose true suboptimality gap exceeds 2D + alpha.
std::vector<std::size_t> check_accuracy(const std::vector<std::size_t>& p,
                                        const MedianMatrix& medians, double d_bias, double alpha);

// Pareto-optimal arms not covered within 2D by any member of P.
std::vector<std::size_t> check_coverage(const std::vector<std::size_t>& p,
                                        const MedianMatrix& medians, double d_bias);

// Estimates in the trace that leave the band |m_hat - m| <= D + U_tau.
std::size_t count_good_event_violations(const RunTrace& trace, const MedianMatrix& medians,
                                        double d_bias);

// Structural invariants of a finished run: |tau_i - tau_j| <= 1 over S,
// S and P disjoint, S never grows, no arm beyond tau_limit rounds, sample
// accounting. Returns one message per violation.
std::vector<std::string> check_run_invariants(const RunTrace& trace, std::size_t arms,
                                              std::int64_t tau_limit);

enum class Algorithm { kRpsi, kBaseline };
std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct RunRow {
  Algorithm algorithm = Algorithm::kRpsi;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t replication = 0;
  bool success = false;
  std::int64_t samples = 0;
  std::vector<std::size_t> returned_arms;
  std::size_t optimal_returned = 0;
  std::size_t optimal_total = 0;
  std::size_t accuracy_violations = 0;
  std::size_t uncovered_optimal = 0;
  std::string terminated_via;
  std::string error;  // non-empty when the cell failed to execute
};

struct AggregateRow {
  Algorithm algorithm = Algorithm::kRpsi;
  double epsilon = 0.0;
  double rsr = 0.0;
  double as_mean = 0.0;
  double ro_mean = 0.0;
  double vc_mean = 0.0;
  std::size_t runs = 0;
};

struct ExperimentReport {
  std::vector<RunRow> runs;
  std::vector<AggregateRow> aggregates;

  const AggregateRow* find(Algorithm a, double epsilon) const;
  std::size_t errored_cells() const;
};

// Builds the uncontaminated instance for one replication.
using InstanceFactory = std::function<Environment(std::uint64_t instance_seed)>;

struct SweepSpec {
  std::vector<Algorithm> algorithms{Algorithm::kRpsi, Algorithm::kBaseline};
  std::vector<double> epsilons;
  std::size_t replications = 10;
  std::uint64_t base_seed = 0;
  InstanceFactory make_instance;
  AdversaryStrategy attack = attack::None{};
  double delta = 0.1;
  double alpha = 0.1;
  double t_bar = 0.49;
  double sigma = 0.1;
  AdversaryClass adversary_class = AdversaryClass::kPrescient;
  std::optional<std::int64_t> max_total_samples;
  unsigned jobs = 1;
};

std::uint64_t cell_seed(std::uint64_t base_seed, Algorithm a, double epsilon,
                        std::size_t replication);
// Instances depend only on the replication, so every algorithm and eps level
// sees the same K environments.
std::uint64_t instance_seed(std::uint64_t base_seed, std::size_t replication);

// Runs one algorithm on one environment and scores the returned set.
RunRow evaluate_run(Algorithm algorithm, const RobustParams& params, const Environment& env,
                    std::optional<std::int64_t> max_total_samples);

AggregateRow aggregate(Algorithm a, double epsilon, const std::vector<const RunRow*>& rows);

ExperimentReport run_experiment(const SweepSpec& spec);

// CSV in the per-run and aggregate schemas. Doubles are written in shortest
// round-trip form.
void write_runs_csv(std::ostream& out, const std::vector<RunRow>& rows);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
std::vector<RunRow> read_runs_csv(std::istream& in);
std::vector<AggregateRow> read_aggregate_csv(std::istream& in);

std::string format_double(double v);

}  // namespace robust_psi
