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

#include "robust_psi/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "robust_psi/errors.hpp"

namespace robust_psi {
namespace {

bool shifted_dominated(const ObjectiveVector& a, double sa, const ObjectiveVector& b, double sb) {
  for (std::size_t d = 0; d < a.size(); ++d) {
    if (a[d] + sa > b[d] + sb) return false;
  }
  return true;
}

}  // namespace

BaselineConfig::BaselineConfig(double a, double d, double s, std::optional<std::int64_t> cap)
    : alpha(a), delta(d), sigma(s), max_total_samples(cap) {
  if (!(alpha >= 0.0)) throw DomainError("baseline: alpha must be nonnegative");
  if (!(delta > 0.0) || !(delta < 1.0)) throw DomainError("baseline: delta must lie in (0, 1)");
  if (!(sigma > 0.0)) throw DomainError("baseline: sigma must be positive");
  if (max_total_samples && *max_total_samples <= 0) {
    throw DomainError("baseline: max_total_samples must be positive");
  }
}

double baseline_radius(const BaselineConfig& config, std::size_t k, std::size_t m,
                       std::int64_t n) {
  if (n < 1) throw DomainError("baseline_radius: n must be >= 1");
  const double nd = static_cast<double>(n);
  const double arg = 4.0 * static_cast<double>(k) * static_cast<double>(m) * nd * nd / config.delta;
  return config.sigma * std::sqrt(2.0 * std::log(arg) / nd);
}

BaselineResult run_mean_psi(const BaselineConfig& config, const Environment& env,
                            ArmStreams& streams) {
  const std::size_t k = env.arms();
  const std::size_t m = env.objectives();
  BaselineResult result;
  BaselineTrace& trace = result.trace;
  std::vector<ObjectiveVector> sums(k, ObjectiveVector(m, 0.0));
  result.means.assign(k, ObjectiveVector(m, 0.0));
  std::vector<std::size_t> sampled(k);
  for (std::size_t i = 0; i < k; ++i) sampled[i] = i;
  std::vector<std::size_t> undecided = sampled;
  std::vector<std::size_t> predicted;
  const std::int64_t cap = config.cap();
  auto drop = [](std::vector<std::size_t>& from, const std::vector<std::size_t>& gone) {
    std::erase_if(from, [&](std::size_t i) {
      return std::find(gone.begin(), gone.end(), i) != gone.end();
    });
  };

  std::int64_t n = 0;
  while (!undecided.empty()) {
    if (trace.total_samples + static_cast<std::int64_t>(sampled.size()) > cap) {
      trace.terminated_via = Termination::kCap;
      break;
    }
    ++n;
    for (std::size_t i : sampled) {
      const PullRecord rec = pull(env, i, streams);
      for (std::size_t d = 0; d < m; ++d) {
        sums[i][d] += rec.observed[d];
        result.means[i][d] = sums[i][d] / static_cast<double>(n);
      }
    }
    trace.total_samples += static_cast<std::int64_t>(sampled.size());

    BaselineRound round;
    round.n = n;
    const double r = baseline_radius(config, k, m, n);
    round.radius = r;
    const auto& mean = result.means;

    for (std::size_t i : undecided) {
      for (std::size_t j : sampled) {
        if (j != i && shifted_dominated(mean[i], r, mean[j], -r)) {
          round.eliminated.push_back(i);
          break;
        }
      }
    }
    drop(undecided, round.eliminated);
    drop(sampled, round.eliminated);

    for (std::size_t i : undecided) {
      const bool blocked = std::any_of(sampled.begin(), sampled.end(), [&](std::size_t j) {
        return j != i && shifted_dominated(mean[i], config.alpha - r, mean[j], r);
      });
      if (!blocked) round.identified.push_back(i);
    }
    drop(undecided, round.identified);
    predicted.insert(predicted.end(), round.identified.begin(), round.identified.end());

    if (2.0 * r <= config.alpha / 2.0 && !undecided.empty()) {
      predicted.insert(predicted.end(), undecided.begin(), undecided.end());
      round.identified.insert(round.identified.end(), undecided.begin(), undecided.end());
      undecided.clear();
      trace.terminated_via = Termination::kEarlyReturn;
    }

    // Identified arms keep being pulled while they may still dominate an
    // undecided arm.
    std::erase_if(sampled, [&](std::size_t i) {
      if (std::find(undecided.begin(), undecided.end(), i) != undecided.end()) return false;
      return std::none_of(undecided.begin(), undecided.end(), [&](std::size_t j) {
        return shifted_dominated(mean[j], -r, mean[i], r);
      });
    });

    round.active = undecided;
    round.sampled = sampled;
    round.predicted = predicted;
    trace.rounds.push_back(std::move(round));
  }

  result.predicted = predicted;
  std::sort(result.predicted.begin(), result.predicted.end());
  return result;
}

BaselineResult run_mean_psi(const BaselineConfig& config, const Environment& env) {
  ArmStreams streams = env.make_streams();
  return run_mean_psi(config, env, streams);
}

}  // namespace robust_psi
