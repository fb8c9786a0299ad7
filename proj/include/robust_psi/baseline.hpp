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

// Mean-based successive-elimination Pareto set identification. Non-robust
// reference: a single large contaminated sample moves its estimate freely.
//
// Every active arm is pulled once per round. After n pulls the confidence
// radius is sigma * sqrt(2 log(4 K M n^2 / delta) / n). An arm moved to P
// stays in the sampled set while it may still dominate an undecided arm, so
// it keeps taking part in elimination.

#include <cstdint>
#include <optional>
#include <vector>

#include "robust_psi/environment.hpp"
#include "robust_psi/rpsi.hpp"

namespace robust_psi {

struct BaselineConfig {
  BaselineConfig(double alpha, double delta, double sigma,
                 std::optional<std::int64_t> max_total_samples = {});

  double alpha;
  double delta;
  double sigma;
  std::optional<std::int64_t> max_total_samples;

  std::int64_t cap() const noexcept { return max_total_samples.value_or(kDefaultSampleCap); }
};

double baseline_radius(const BaselineConfig& config, std::size_t k, std::size_t m,
                       std::int64_t n);

struct BaselineRound {
  std::int64_t n = 0;
  double radius = 0.0;
  std::vector<std::size_t> eliminated;
  std::vector<std::size_t> identified;
  std::vector<std::size_t> active;   // undecided after the round
  std::vector<std::size_t> sampled;  // pulled next round
  std::vector<std::size_t> predicted;
};

struct BaselineTrace {
  std::vector<BaselineRound> rounds;
  std::int64_t total_samples = 0;
  Termination terminated_via = Termination::kEmptyUndecided;
};

struct BaselineResult {
  std::vector<std::size_t> predicted;  // ascending
  std::vector<ObjectiveVector> means;  // final empirical means
  BaselineTrace trace;
};

BaselineResult run_mean_psi(const BaselineConfig& config, const Environment& env,
                            ArmStreams& streams);
BaselineResult run_mean_psi(const BaselineConfig& config, const Environment& env);

}  // namespace robust_psi
