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

// Robust Pareto set identification: a median-based elimination algorithm for
// multi-objective bandits whose samples are contaminated with probability eps.
//
// Each loop iteration after the first re-samples the undecided arm with the
// largest statistical bias U, then
//   eliminates  i  if  m_i + D + U_i  <=  m_j - D - U_j  for some other j in S,
//   collects    O1 = { i : no j with m_i - U_i + alpha <= m_j + U_j },
// and, while some U_k > alpha/4, moves
//   O2 = { i in O1 : no j with m_j - U_j + alpha <= m_i + U_i }
// into the predicted set P. Once every U_k <= alpha/4, all of O1 joins P and
// the run ends. Vector-scalar sums are componentwise; <= is weak dominance.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "robust_psi/core.hpp"
#include "robust_psi/environment.hpp"

namespace robust_psi {

inline constexpr std::int64_t kDefaultSampleCap = 100'000'000;

struct RpsiConfig {
  explicit RpsiConfig(RobustParams params, std::optional<std::int64_t> max_total_samples = {});

  RobustParams params;
  std::optional<std::int64_t> max_total_samples;

  std::int64_t cap() const noexcept { return max_total_samples.value_or(kDefaultSampleCap); }
};

enum class Termination { kEmptyUndecided, kEarlyReturn, kCap };
std::string_view to_string(Termination t);

struct RpsiState {
  std::size_t arms = 0;
  std::size_t objectives = 0;
  std::vector<std::size_t> undecided;  // S, ascending
  std::vector<std::size_t> predicted;  // P, in order of identification
  std::vector<std::int64_t> round;     // tau_i
  // sample_store[i][d] holds every observed value of arm i, objective d.
  std::vector<std::vector<std::vector<double>>> sample_store;
  std::vector<ObjectiveVector> emp_median;
  std::vector<double> bias;  // U_{i, tau_i}
  std::int64_t t = 0;
  std::int64_t total_samples = 0;
  std::int64_t init_batch = 0;  // n0

  bool in_undecided(std::size_t arm) const;
};

struct LoopSnapshot {
  std::int64_t t = 0;
  std::optional<std::size_t> selected;  // absent on the first loop
  std::int64_t batch = 0;
  std::vector<std::size_t> eliminated;
  std::vector<std::size_t> o1;
  std::vector<std::size_t> o2;
  // State at the end of the loop.
  std::vector<std::size_t> undecided;
  std::vector<std::size_t> predicted;
  std::vector<std::int64_t> round;
};

// Empirical median vector of an arm right after it was (re)sampled.
struct EstimateRecord {
  std::size_t arm = 0;
  std::int64_t tau = 0;
  ObjectiveVector median;
  double bias = 0.0;
};

struct RunTrace {
  std::vector<LoopSnapshot> loops;
  std::vector<EstimateRecord> estimates;
  std::vector<std::size_t> predicted;
  std::int64_t init_samples = 0;  // K * n0
  std::int64_t total_samples = 0;
  Termination terminated_via = Termination::kEmptyUndecided;
};

struct RpsiResult {
  std::vector<std::size_t> predicted;  // ascending
  RunTrace trace;
};

struct IdentifyOutcome {
  std::vector<std::size_t> o1;
  std::vector<std::size_t> o2;
  bool early_return = false;
};

// Pulls every arm n0 times. All arms start in S with tau = 1.
RpsiState initialize(const RpsiConfig& config, const Environment& env, ArmStreams& streams);

// Arm of S with the largest U; lowest index on ties. StateError on empty S.
std::size_t select_arm(const RpsiState& state);

// Advances tau of `arm` and pulls it round_samples_n(tau) times. Returns the
// batch size.
std::int64_t sampling_step(RpsiState& state, const RpsiConfig& config, const Environment& env,
                           ArmStreams& streams, std::size_t arm);

// Simultaneous elimination against a snapshot of S. Returns the removed arms.
std::vector<std::size_t> eliminate(RpsiState& state, double d_bias);

// Identification step; moves O2 (or O1 on early return) from S to P.
IdentifyOutcome identify(RpsiState& state, double alpha);

RpsiResult run_rpsi(const RpsiConfig& config, const Environment& env, ArmStreams& streams);
RpsiResult run_rpsi(const RpsiConfig& config, const Environment& env);

}  // namespace robust_psi
