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

#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "robust_psi/errors.hpp"
#include "robust_psi/eval.hpp"
#include "robust_psi/rpsi.hpp"

using namespace robust_psi;

namespace {

RobustParams synthetic(double eps = 0.0) {
  return RobustParams(eps, 0.1, 0.1, 0.49, 0.1, AdversaryClass::kPrescient);
}

Environment synthetic_instance(std::uint64_t seed, double eps = 0.0) {
  return random_gaussian_instance(10, 2, 0.0, 10.0, 0.1, seed)
      .with_attack(attack::Offset{-1.0, 1.0}, eps)
      .with_seed(seed * 7 + 1);
}

// Hand-built state for exercising the elimination and identification rules.
RpsiState manual_state(std::vector<ObjectiveVector> medians, std::vector<double> bias) {
  RpsiState s;
  s.arms = medians.size();
  s.objectives = medians.front().size();
  for (std::size_t i = 0; i < s.arms; ++i) s.undecided.push_back(i);
  s.round.assign(s.arms, 1);
  s.emp_median = std::move(medians);
  s.bias = std::move(bias);
  return s;
}

}  // namespace

TEST_CASE("initialize samples every arm n0 times") {
  const Environment env = synthetic_instance(3);
  ArmStreams streams = env.make_streams();
  const RpsiState s = initialize(RpsiConfig(synthetic()), env, streams);
  CHECK(s.init_batch == 55);
  CHECK(s.total_samples == 550);
  CHECK(s.t == 0);
  CHECK(s.predicted.empty());
  CHECK(s.undecided.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(s.round[i] == 1);
    CHECK(s.bias[i] == s.bias[0]);
    CHECK(s.sample_store[i][0].size() == 55);
    for (std::size_t d = 0; d < 2; ++d) {
      CHECK(s.emp_median[i][d] == empirical_median(s.sample_store[i][d]));
    }
  }

  const Environment single({GaussianArm{{1.0, 2.0}, 0.1}}, attack::None{}, 0.0, 1);
  ArmStreams s1 = single.make_streams();
  const RpsiState one = initialize(RpsiConfig(synthetic()), single, s1);
  CHECK(one.undecided == std::vector<std::size_t>{0});
  CHECK(one.total_samples == one.init_batch);
}

TEST_CASE("select_arm") {
  RpsiState s = manual_state({{0, 0}, {1, 1}, {2, 2}}, {0.5, 0.5, 0.5});
  CHECK(select_arm(s) == 0);
  s.bias[2] = 0.7;
  CHECK(select_arm(s) == 2);
  s.undecided = {1};
  CHECK(select_arm(s) == 1);
  s.undecided.clear();
  CHECK_THROWS_AS(select_arm(s), StateError);
}

TEST_CASE("sampling_step advances one arm") {
  const Environment env = synthetic_instance(4);
  ArmStreams streams = env.make_streams();
  const RpsiConfig cfg(synthetic());
  RpsiState s = initialize(cfg, env, streams);
  const auto before = s.emp_median;
  const double u_before = s.bias[0];
  const std::int64_t batch = sampling_step(s, cfg, env, streams, 0);
  CHECK(batch == 79);
  CHECK(s.round[0] == 2);
  CHECK(s.total_samples == 550 + 79);
  CHECK(s.sample_store[0][0].size() == 55 + 79);
  CHECK(s.bias[0] < u_before);
  for (std::size_t i = 1; i < 10; ++i) CHECK(s.emp_median[i] == before[i]);
  s.undecided.erase(s.undecided.begin());
  CHECK_THROWS_AS(sampling_step(s, cfg, env, streams, 0), StateError);
}

TEST_CASE("eliminate") {
  RpsiState far = manual_state({{0, 0}, {10, 10}}, {1.0, 1.0});
  CHECK(eliminate(far, 0.0) == std::vector<std::size_t>{0});
  CHECK(far.undecided == std::vector<std::size_t>{1});

  RpsiState close = manual_state({{0, 0}, {10, 10}}, {1.0, 1.0});
  CHECK(eliminate(close, 4.5).empty());

  RpsiState one_dim = manual_state({{0, 5}, {10, 5.1}}, {0.1, 0.1});
  CHECK(eliminate(one_dim, 0.0).empty());

  // Simultaneous semantics: a chain 0 < 1 < 2 removes both 0 and 1, since
  // arm 1 is judged against the snapshot that still contains arm 2.
  RpsiState chain = manual_state({{0, 0}, {5, 5}, {10, 10}}, {0.1, 0.1, 0.1});
  CHECK(eliminate(chain, 0.0) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("identify") {
  RpsiState pair = manual_state({{0, 0}, {10, 10}}, {0.01, 0.01});
  const IdentifyOutcome a = identify(pair, 0.1);
  CHECK(a.o1 == std::vector<std::size_t>{1});
  CHECK(a.early_return);
  CHECK(pair.predicted == std::vector<std::size_t>{1});
  CHECK(pair.undecided == std::vector<std::size_t>{0});

  RpsiState single = manual_state({{3, 3}}, {5.0});
  const IdentifyOutcome b = identify(single, 0.1);
  CHECK(b.o1 == std::vector<std::size_t>{0});
  CHECK(b.o2 == std::vector<std::size_t>{0});
  CHECK_FALSE(b.early_return);
  CHECK(single.undecided.empty());

  // Wide intervals: each arm could still be dominated by the other.
  RpsiState wide = manual_state({{0, 1}, {1, 0}}, {2.0, 2.0});
  const IdentifyOutcome c = identify(wide, 0.1);
  CHECK(c.o1.empty());
  CHECK(c.o2.empty());
  CHECK_FALSE(c.early_return);

  // A clear winner whose interval still overlaps the loser's stays in S.
  RpsiState mid = manual_state({{1, 1}, {0, 0}}, {0.3, 0.3});
  const IdentifyOutcome e = identify(mid, 0.1);
  CHECK(e.o1 == std::vector<std::size_t>{0});
  CHECK(e.o2.empty());
  CHECK(mid.undecided.size() == 2);
  CHECK(mid.predicted.empty());
}

TEST_CASE("single arm run") {
  const Environment env({GaussianArm{{1.0, 2.0}, 0.1}}, attack::None{}, 0.0, 1);
  const RpsiResult r = run_rpsi(RpsiConfig(synthetic()), env);
  CHECK(r.predicted == std::vector<std::size_t>{0});
  CHECK(r.trace.loops.size() == 1);
}

TEST_CASE("adversary-free synthetic runs pass and respect the theoretical bound") {
  const RobustParams p = synthetic();
  const std::int64_t tau_alpha = tau_threshold(p, p.alpha());
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Environment env = synthetic_instance(seed);
    const RpsiResult r = run_rpsi(RpsiConfig(p), env);
    const MedianMatrix& truth = env.true_medians();
    CHECK(check_accuracy(r.predicted, truth, 0.0, p.alpha()).empty());
    CHECK(check_coverage(r.predicted, truth, 0.0).empty());
    CHECK(check_run_invariants(r.trace, env.arms(), tau_alpha).empty());
    if (count_good_event_violations(r.trace, truth, 0.0) == 0) {
      const auto gaps = subopt_gaps(truth);
      CHECK(r.trace.total_samples <= theoretical_sample_bound(p, gaps, 2).gap_free);
    }
  }
}

TEST_CASE("trace bookkeeping") {
  const Environment env = synthetic_instance(12, 0.2);
  const RpsiResult r = run_rpsi(RpsiConfig(synthetic(0.2)), env);
  std::int64_t total = r.trace.init_samples;
  std::set<std::size_t> seen_eliminated;
  for (const auto& loop : r.trace.loops) {
    total += loop.batch;
    CHECK(loop.selected.has_value() == (loop.t > 0));
    seen_eliminated.insert(loop.eliminated.begin(), loop.eliminated.end());
  }
  CHECK(total == r.trace.total_samples);
  CHECK(r.trace.init_samples == 10 * init_samples_n0(synthetic(0.2), 10, 2));
  CHECK(std::is_sorted(r.predicted.begin(), r.predicted.end()));
  for (std::size_t i : r.predicted) CHECK(seen_eliminated.count(i) == 0);
  CHECK(r.trace.estimates.size() == 10 + r.trace.loops.size() - 1);
}

TEST_CASE("runs are deterministic given the seed") {
  const Environment env = synthetic_instance(8, 0.3);
  const RpsiResult a = run_rpsi(RpsiConfig(synthetic(0.3)), env);
  const RpsiResult b = run_rpsi(RpsiConfig(synthetic(0.3)), env);
  CHECK(a.predicted == b.predicted);
  CHECK(a.trace.total_samples == b.trace.total_samples);
}

TEST_CASE("sample cap") {
  const Environment env = synthetic_instance(9);
  const RpsiResult tiny = run_rpsi(RpsiConfig(synthetic(), 100), env);
  CHECK(tiny.trace.terminated_via == Termination::kCap);
  CHECK(tiny.trace.total_samples == 0);
  CHECK(tiny.predicted.empty());

  const RpsiResult some = run_rpsi(RpsiConfig(synthetic(), 600), env);
  CHECK(some.trace.terminated_via == Termination::kCap);
  CHECK(some.trace.total_samples <= 600);
  CHECK_THROWS_AS(RpsiConfig(synthetic(), 0), DomainError);
  CHECK(RpsiConfig(synthetic()).cap() == kDefaultSampleCap);
}

TEST_CASE("median estimator shrugs off a huge outlier") {
  std::vector<double> v(101, 1.0);
  const double before = empirical_median(v);
  v[0] = 1e6;
  CHECK(empirical_median(v) == before);
}
