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

#include "robust_psi/rpsi.hpp"

#include <algorithm>

#include "robust_psi/errors.hpp"

namespace robust_psi {
namespace {

// a + sa <= b + sb componentwise, with scalar offsets.
bool shifted_dominated(const ObjectiveVector& a, double sa, const ObjectiveVector& b, double sb) {
  for (std::size_t d = 0; d < a.size(); ++d) {
    if (a[d] + sa > b[d] + sb) return false;
  }
  return true;
}

void pull_batch(RpsiState& state, const Environment& env, ArmStreams& streams,
                std::size_t arm, std::int64_t count) {
  auto& store = state.sample_store[arm];
  for (auto& col : store) col.reserve(col.size() + static_cast<std::size_t>(count));
  for (std::int64_t n = 0; n < count; ++n) {
    const PullRecord rec = pull(env, arm, streams);
    for (std::size_t d = 0; d < state.objectives; ++d) store[d].push_back(rec.observed[d]);
  }
  state.total_samples += count;
}

void refresh_estimates(RpsiState& state, const RobustParams& params, std::size_t arm) {
  for (std::size_t d = 0; d < state.objectives; ++d) {
    state.emp_median[arm][d] = empirical_median(state.sample_store[arm][d]);
  }
  state.bias[arm] = stat_bias_u(params, state.round[arm]);
}

EstimateRecord estimate_of(const RpsiState& state, std::size_t arm) {
  return {arm, state.round[arm], state.emp_median[arm], state.bias[arm]};
}

void remove_from_undecided(RpsiState& state, const std::vector<std::size_t>& arms) {
  if (arms.empty()) return;
  std::erase_if(state.undecided, [&](std::size_t i) {
    return std::find(arms.begin(), arms.end(), i) != arms.end();
  });
}

}  // namespace

RpsiConfig::RpsiConfig(RobustParams p, std::optional<std::int64_t> cap)
    : params(p), max_total_samples(cap) {
  if (max_total_samples && *max_total_samples <= 0) {
    throw DomainError("max_total_samples must be positive");
  }
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kEmptyUndecided: return "empty_S";
    case Termination::kEarlyReturn: return "early_return";
    case Termination::kCap: return "cap";
  }
  return "unknown";
}

bool RpsiState::in_undecided(std::size_t arm) const {
  return std::binary_search(undecided.begin(), undecided.end(), arm);
}

RpsiState initialize(const RpsiConfig& config, const Environment& env, ArmStreams& streams) {
  RpsiState state;
  state.arms = env.arms();
  state.objectives = env.objectives();
  const std::size_t k = state.arms;
  const std::size_t m = state.objectives;
  state.undecided.resize(k);
  for (std::size_t i = 0; i < k; ++i) state.undecided[i] = i;
  state.round.assign(k, 1);
  state.sample_store.assign(k, std::vector<std::vector<double>>(m));
  state.emp_median.assign(k, ObjectiveVector(m, 0.0));
  state.bias.assign(k, 0.0);
  state.init_batch = init_samples_n0(config.params, k, m);
  for (std::size_t i = 0; i < k; ++i) {
    pull_batch(state, env, streams, i, state.init_batch);
    refresh_estimates(state, config.params, i);
  }
  return state;
}

std::size_t select_arm(const RpsiState& state) {
  if (state.undecided.empty()) throw StateError("select_arm: undecided set is empty");
  std::size_t best = state.undecided.front();
  for (std::size_t i : state.undecided) {
    if (state.bias[i] > state.bias[best]) best = i;
  }
  return best;
}

std::int64_t sampling_step(RpsiState& state, const RpsiConfig& config, const Environment& env,
                           ArmStreams& streams, std::size_t arm) {
  if (!state.in_undecided(arm)) throw StateError("sampling_step: arm is not undecided");
  const std::int64_t tau = state.round[arm] + 1;
  const std::int64_t batch = round_samples_n(config.params, tau, state.arms, state.objectives);
  state.round[arm] = tau;
  pull_batch(state, env, streams, arm, batch);
  refresh_estimates(state, config.params, arm);
  return batch;
}

std::vector<std::size_t> eliminate(RpsiState& state, double d_bias) {
  std::vector<std::size_t> removed;
  for (std::size_t i : state.undecided) {
    for (std::size_t j : state.undecided) {
      if (j == i) continue;
      if (shifted_dominated(state.emp_median[i], d_bias + state.bias[i], state.emp_median[j],
                            -d_bias - state.bias[j])) {
        removed.push_back(i);
        break;
      }
    }
  }
  remove_from_undecided(state, removed);
  return removed;
}

IdentifyOutcome identify(RpsiState& state, double alpha) {
  IdentifyOutcome out;
  const auto& s = state.undecided;
  for (std::size_t i : s) {
    const bool blocked = std::any_of(s.begin(), s.end(), [&](std::size_t j) {
      return j != i && shifted_dominated(state.emp_median[i], alpha - state.bias[i],
                                         state.emp_median[j], state.bias[j]);
    });
    if (!blocked) out.o1.push_back(i);
  }

  const bool uncertain =
      std::any_of(s.begin(), s.end(), [&](std::size_t k) { return state.bias[k] > alpha / 4.0; });
  if (uncertain) {
    for (std::size_t i : out.o1) {
      const bool could_cover = std::any_of(s.begin(), s.end(), [&](std::size_t j) {
        return j != i && shifted_dominated(state.emp_median[j], alpha - state.bias[j],
                                           state.emp_median[i], state.bias[i]);
      });
      if (!could_cover) out.o2.push_back(i);
    }
    remove_from_undecided(state, out.o2);
    state.predicted.insert(state.predicted.end(), out.o2.begin(), out.o2.end());
  } else {
    out.early_return = true;
    remove_from_undecided(state, out.o1);
    state.predicted.insert(state.predicted.end(), out.o1.begin(), out.o1.end());
  }
  return out;
}

RpsiResult run_rpsi(const RpsiConfig& config, const Environment& env, ArmStreams& streams) {
  RpsiResult result;
  RunTrace& trace = result.trace;
  const RobustParams& params = config.params;
  const double d_bias = params.bias_d();
  const std::int64_t cap = config.cap();

  const std::int64_t n0 = init_samples_n0(params, env.arms(), env.objectives());
  if (n0 * static_cast<std::int64_t>(env.arms()) > cap) {
    trace.terminated_via = Termination::kCap;
    return result;
  }
  RpsiState state = initialize(config, env, streams);
  trace.init_samples = state.total_samples;
  for (std::size_t i = 0; i < state.arms; ++i) trace.estimates.push_back(estimate_of(state, i));

  trace.terminated_via = Termination::kEmptyUndecided;
  while (!state.undecided.empty()) {
    LoopSnapshot snap;
    snap.t = state.t;
    if (state.t > 0) {
      const std::size_t arm = select_arm(state);
      const std::int64_t next =
          round_samples_n(params, state.round[arm] + 1, state.arms, state.objectives);
      if (state.total_samples + next > cap) {
        trace.terminated_via = Termination::kCap;
        break;
      }
      snap.selected = arm;
      snap.batch = sampling_step(state, config, env, streams, arm);
      trace.estimates.push_back(estimate_of(state, arm));
    }
    snap.eliminated = eliminate(state, d_bias);
    IdentifyOutcome id = identify(state, params.alpha());
    snap.o1 = std::move(id.o1);
    snap.o2 = std::move(id.o2);
    snap.undecided = state.undecided;
    snap.predicted = state.predicted;
    snap.round = state.round;
    trace.loops.push_back(std::move(snap));
    ++state.t;
    if (id.early_return) {
      trace.terminated_via = Termination::kEarlyReturn;
      break;
    }
  }

  result.predicted = state.predicted;
  std::sort(result.predicted.begin(), result.predicted.end());
  trace.predicted = result.predicted;
  trace.total_samples = state.total_samples;
  return result;
}

RpsiResult run_rpsi(const RpsiConfig& config, const Environment& env) {
  ArmStreams streams = env.make_streams();
  return run_rpsi(config, env, streams);
}

}  // namespace robust_psi
