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
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "robust_psi/core.hpp"
#include "robust_psi/errors.hpp"

using namespace robust_psi;
using oracle::Big;

namespace {

const AdversaryClass kClasses[] = {AdversaryClass::kOblivious, AdversaryClass::kPrescient,
                                   AdversaryClass::kMalicious};

RobustParams synthetic(double eps = 0.0) {
  return RobustParams(eps, 0.1, 0.1, 0.49, 0.1, AdversaryClass::kPrescient);
}

}  // namespace

TEST_CASE("subgaussian_r matches frozen high-precision values") {
  CHECK(subgaussian_r(1.0, 0.0) == doctest::Approx(2.3548200450309493).epsilon(1e-14));
  CHECK(subgaussian_r(0.1, 0.125) == doctest::Approx(0.25780022208456855).epsilon(1e-14));
  CHECK(subgaussian_r(0.2, 0.4) == doctest::Approx(0.66467520976096439).epsilon(1e-14));
}

TEST_CASE("subgaussian_r domain") {
  CHECK_THROWS_AS(subgaussian_r(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(subgaussian_r(1.0, -0.01), DomainError);
  CHECK_THROWS_AS(subgaussian_r(0.0, 0.1), DomainError);
  CHECK_THROWS_AS(subgaussian_r(-1.0, 0.1), DomainError);
  CHECK(subgaussian_r(1.0, 0.4999999999) > 6.0);
  double prev = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double v = subgaussian_r(1.0, i * 0.0099);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("h_epsilon branches") {
  CHECK(h_epsilon(AdversaryClass::kOblivious, 0.2) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(h_epsilon(AdversaryClass::kPrescient, 0.2) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(h_epsilon(AdversaryClass::kMalicious, 0.2) == 0.2);
  CHECK(h_epsilon(AdversaryClass::kPrescient, 0.0) == 0.0);
  CHECK_THROWS_AS(h_epsilon(AdversaryClass::kPrescient, 0.5), DomainError);
  CHECK_THROWS_AS(h_epsilon(AdversaryClass::kPrescient, -0.1), DomainError);
}

TEST_CASE("beta values and admissibility") {
  CHECK(beta(0.49, 0.0, AdversaryClass::kPrescient) ==
        doctest::Approx(4.1649312786339025).epsilon(1e-14));
  CHECK(beta(0.49, 0.1, AdversaryClass::kMalicious) ==
        doctest::Approx(6.5746219592373439).epsilon(1e-14));
  CHECK_THROWS_AS(beta(0.49, 0.49, AdversaryClass::kMalicious), AdmissibilityError);
  // 2 t / (1 + 2 t) at t = 0.25 is 1/3; just above it h reaches t.
  CHECK_NOTHROW(beta(0.25, 0.33, AdversaryClass::kOblivious));
  CHECK_THROWS_AS(beta(0.25, 0.34, AdversaryClass::kOblivious), AdmissibilityError);
  CHECK_THROWS_AS(beta(0.5, 0.0, AdversaryClass::kOblivious), DomainError);
}

TEST_CASE("RobustParams derived constants") {
  const RobustParams p(0.2, 0.1, 0.1, 0.49, 0.1, AdversaryClass::kOblivious);
  CHECK(p.h_eps() == doctest::Approx(0.125));
  CHECK(p.delta_tilde() == doctest::Approx(0.05));
  CHECK(p.bias_d() == doctest::Approx(0.25780022208456855).epsilon(1e-14));
  CHECK(bias_d(p) == p.bias_d());

  const RobustParams mal(0.4, 0.3, 0.1, 0.49, 0.2, AdversaryClass::kMalicious);
  CHECK(mal.delta_tilde() == doctest::Approx(0.1));
  CHECK(mal.bias_d() == doctest::Approx(subgaussian_r(0.2, 0.4)).epsilon(1e-15));

  for (AdversaryClass c : kClasses) {
    CHECK(RobustParams(0.0, 0.1, 0.1, 0.49, 0.1, c).bias_d() == 0.0);
  }

  const RobustParams obl(0.3, 0.1, 0.1, 0.4, 0.5, AdversaryClass::kOblivious);
  const RobustParams pre(0.3, 0.1, 0.1, 0.4, 0.5, AdversaryClass::kPrescient);
  CHECK(obl.h_eps_ext() == pre.h_eps_ext());
  CHECK(obl.beta_ext() == pre.beta_ext());
  CHECK(obl.delta_tilde_ext() == pre.delta_tilde_ext());
}

TEST_CASE("RobustParams validation") {
  CHECK_THROWS_AS(RobustParams(0.6, 0.1, 0.1, 0.49, 0.1, AdversaryClass::kOblivious), DomainError);
  CHECK_THROWS_AS(RobustParams(0.1, 0.0, 0.1, 0.49, 0.1, AdversaryClass::kOblivious), DomainError);
  CHECK_THROWS_AS(RobustParams(0.1, 1.0, 0.1, 0.49, 0.1, AdversaryClass::kOblivious), DomainError);
  CHECK_THROWS_AS(RobustParams(0.1, 0.1, -0.1, 0.49, 0.1, AdversaryClass::kOblivious), DomainError);
  CHECK_THROWS_AS(RobustParams(0.1, 0.1, 0.1, 0.49, 0.0, AdversaryClass::kOblivious), DomainError);
  CHECK_THROWS_AS(RobustParams(0.1, 0.1, 0.1, 0.5, 0.1, AdversaryClass::kOblivious), DomainError);
  CHECK_THROWS_AS(RobustParams(0.3, 0.1, 0.1, 0.2, 0.1, AdversaryClass::kMalicious),
                  AdmissibilityError);
  CHECK_NOTHROW(RobustParams(0.4, 0.1, 0.1, 0.49, 0.1, AdversaryClass::kPrescient));
}

TEST_CASE("parse_adversary_class") {
  CHECK(parse_adversary_class("Malicious") == AdversaryClass::kMalicious);
  CHECK(parse_adversary_class("oblivious") == AdversaryClass::kOblivious);
  CHECK(to_string(AdversaryClass::kPrescient) == "prescient");
  CHECK_THROWS_AS(parse_adversary_class("benign"), DomainError);
}

TEST_CASE("stat_bias_u values and monotonicity") {
  const RobustParams p = synthetic();
  // 1/sqrt(beta) equals t_bar here, so U_1 = R(0.49) - R(0).
  CHECK(stat_bias_u(p, 1) == doctest::Approx(0.18574442362548180).epsilon(1e-13));
  CHECK(stat_bias_u(p, 4) == doctest::Approx(0.047576373352090209).epsilon(1e-13));
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t tau = 1; tau < 2000; tau += 7) {
    const double v = stat_bias_u(p, tau);
    CHECK(v >= 0.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(stat_bias_u(p, 1'000'000'000) < 1e-5);
  CHECK_THROWS_AS(stat_bias_u(p, 0), DomainError);

  // The shifted level h + (t_bar - h) / sqrt(tau) never passes t_bar, so U is
  // finite for admissible parameters and U_1 = R(t_bar) - R(h).
  const RobustParams edge(0.3, 0.1, 0.1, 0.35, 0.1, AdversaryClass::kMalicious);
  CHECK(std::isfinite(stat_bias_u(edge, 1)));
  CHECK(stat_bias_u(edge, 1) ==
        doctest::Approx(subgaussian_r(0.1, 0.35) - subgaussian_r(0.1, 0.3)).epsilon(1e-12));
}

TEST_CASE("init_samples_n0 and round_samples_n on the synthetic configuration") {
  const RobustParams p = synthetic();
  CHECK(init_samples_n0(p, 10, 2) == 55);
  CHECK(round_samples_n(p, 2, 10, 2) == 79);
  CHECK(round_samples_n(p, 2, 2, 1) > round_samples_n(p, 2, 1, 1));
  CHECK_THROWS_AS(round_samples_n(p, 1, 10, 2), DomainError);
  CHECK_THROWS_AS(init_samples_n0(p, 0, 2), DomainError);
  const RobustParams loose(0.0, 0.99, 0.1, 0.49, 0.1, AdversaryClass::kMalicious);
  CHECK(init_samples_n0(loose, 1, 1) >= 1);
}

TEST_CASE("doubling K adds ceil(2 beta log 2) to n0 up to rounding") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double t_bar = 0.1 + 0.39 * unif(rng);
    const RobustParams p(0.0, 0.01 + 0.9 * unif(rng), 0.1, t_bar, 1.0, AdversaryClass::kOblivious);
    const std::size_t k = 1 + static_cast<std::size_t>(unif(rng) * 30);
    const auto step = static_cast<std::int64_t>(std::ceil(2.0 * p.beta() * std::log(2.0)));
    const std::int64_t diff = init_samples_n0(p, 2 * k, 3) - init_samples_n0(p, k, 3);
    CHECK(diff >= step - 1);
    CHECK(diff <= step + 1);
  }
}

TEST_CASE("cumulative schedule covers the per-round confidence requirement") {
  const oracle::Params op = oracle::from(0.0, 0.1, 0.1, 0.49, 0.1, AdversaryClass::kPrescient);
  const RobustParams p = synthetic();
  const Big b = oracle::beta(op);
  const Big dt = oracle::delta_tilde(op);
  std::int64_t total = init_samples_n0(p, 10, 2);
  for (std::int64_t tau = 2; tau <= 50; ++tau) {
    total += round_samples_n(p, tau, 10, 2);
    using boost::multiprecision::log;
    const Big need = 2 * Big(tau) * b *
                     log(Big(tau) * tau * 10 * 2 * oracle::pi() * oracle::pi() / (6 * dt));
    CHECK(Big(total) >= need);
  }
}

TEST_CASE("tau_threshold agrees with a forward scan") {
  const RobustParams p = synthetic();
  CHECK(tau_threshold(p, 0.1) == 13);
  CHECK(tau_threshold(p, 100.0) == 1);
  CHECK_THROWS_AS(tau_threshold(p, 0.0), DomainError);
  CHECK_THROWS_AS(tau_threshold(p, -1.0), DomainError);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const AdversaryClass c = kClasses[trial % 3];
    const double t_bar = 0.15 + 0.34 * unif(rng);
    const double eps_max =
        c == AdversaryClass::kMalicious ? t_bar : 2.0 * t_bar / (1.0 + 2.0 * t_bar);
    const double eps = 0.9 * eps_max * unif(rng);
    const double sigma = 0.05 + unif(rng);
    const double a = sigma * (0.2 + 3.0 * unif(rng));
    const RobustParams q(eps, 0.1, a, t_bar, sigma, c);
    std::int64_t scan = 1;
    while (!(stat_bias_u(q, scan) <= a / 4.0)) ++scan;
    CHECK(tau_threshold(q, a) == scan);
  }
}

TEST_CASE("halving a never lowers tau_threshold") {
  const RobustParams p(0.1, 0.1, 0.1, 0.45, 0.3, AdversaryClass::kOblivious);
  std::int64_t prev = 0;
  for (double a = 4.0; a > 0.01; a /= 2.0) {
    const std::int64_t t = tau_threshold(p, a);
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("theoretical_sample_bound") {
  const RobustParams p = synthetic();
  const std::vector<double> zeros(10, 0.0);
  const SampleBound all_opt = theoretical_sample_bound(p, zeros, 2);
  CHECK(all_opt.tau_alpha == 13);
  CHECK(all_opt.gap_free == 12843);
  CHECK(all_opt.gap_dependent <= all_opt.gap_free);

  std::vector<double> gaps = zeros;
  gaps[3] = 5.0;
  const SampleBound one_far = theoretical_sample_bound(p, gaps, 2);
  CHECK(one_far.gap_dependent < all_opt.gap_dependent);
  CHECK(one_far.gap_free == all_opt.gap_free);
  CHECK(tau_threshold(p, 5.0) < tau_threshold(p, 0.1));

  const oracle::Params op = oracle::from(0.0, 0.1, 0.1, 0.49, 0.1, AdversaryClass::kPrescient);
  const auto want = oracle::bounds(op, gaps, 2);
  CHECK(one_far.gap_dependent == want.gap_dependent);
  CHECK(one_far.gap_free == want.gap_free);

  CHECK_THROWS_AS(theoretical_sample_bound(p, std::vector<double>{}, 2), DomainError);
  CHECK_THROWS_AS(theoretical_sample_bound(p, std::vector<double>{-1.0}, 2), DomainError);
}

TEST_CASE("bound grows without limit near the admissibility edge") {
  const double limit = 2.0 * 0.49 / (1.0 + 2.0 * 0.49);
  std::int64_t prev = 0;
  for (double frac : {0.0, 0.5, 0.9, 0.99, 0.999}) {
    const RobustParams p(frac * limit, 0.1, 0.1, 0.49, 0.1, AdversaryClass::kPrescient);
    const std::int64_t n0 = init_samples_n0(p, 10, 2);
    CHECK(n0 > prev);
    prev = n0;
  }
  CHECK(prev > 100'000);
}

TEST_CASE("empirical_median") {
  CHECK(empirical_median(std::vector<double>{5, 1, 3}) == 3.0);
  CHECK(empirical_median(std::vector<double>{1, 2, 3, 10}) == 2.5);
  CHECK(empirical_median(std::vector<double>{-7.25}) == -7.25);
  CHECK_THROWS_AS(empirical_median(std::vector<double>{}), DomainError);

  const std::vector<double> input{4, 9, 1, 1, 7, 3};
  const std::vector<double> copy = input;
  (void)empirical_median(input);
  CHECK(input == copy);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 17);
    for (double& x : v) x = nd(rng);
    const double med = empirical_median(v);
    CHECK(med >= *std::min_element(v.begin(), v.end()));
    CHECK(med <= *std::max_element(v.begin(), v.end()));
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(empirical_median(v) == med);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double want = n % 2 ? sorted[n / 2] : sorted[n / 2 - 1] + (sorted[n / 2] - sorted[n / 2 - 1]) / 2;
    CHECK(med == want);
  }
}

TEST_CASE("EmpiricalCdf quantiles") {
  const EmpiricalCdf even({4, 2, 3, 1});
  CHECK(even.quantile_left(0.5) == 2.0);
  CHECK(even.quantile_right(0.5) == 3.0);
  CHECK(even.median_of_interest() == 2.5);
  CHECK(median_of_interest(even) == empirical_median(std::vector<double>{1, 2, 3, 4}));
  CHECK(even.cdf(2.0) == 0.5);
  CHECK(even.cdf(0.5) == 0.0);
  CHECK(even.cdf(10.0) == 1.0);

  const EmpiricalCdf odd({1, 2, 3});
  CHECK(odd.quantile_left(0.5) == 2.0);
  CHECK(odd.quantile_right(0.5) == 2.0);

  CHECK(even.quantile_left(0.0) == 1.0);
  CHECK(even.quantile_left(1.0) == 4.0);
  CHECK_THROWS_AS(even.quantile_left(1.1), DomainError);
  CHECK_THROWS_AS(even.quantile_right(1.0), DomainError);
  CHECK_THROWS_AS(even.quantile_right(-0.1), DomainError);
  CHECK_THROWS_AS(EmpiricalCdf(std::vector<double>{}), DomainError);

  CHECK(median_of_interest(GaussianDistribution{7.3, 0.1}) == 7.3);
}

TEST_CASE("EmpiricalCdf quantiles match the infimum definitions by scan") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> val(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> pts(1 + trial % 9);
    for (double& x : pts) x = val(rng);
    const EmpiricalCdf cdf(pts);
    std::vector<double> grid = pts;
    std::sort(grid.begin(), grid.end());
    double prev_l = -1e300;
    double prev_r = -1e300;
    for (int i = 0; i <= 40; ++i) {
      const double p = i / 40.0;
      double want_l = grid.back();
      for (double x : grid) {
        if (cdf.cdf(x) >= p) {
          want_l = x;
          break;
        }
      }
      CHECK(cdf.quantile_left(p) == want_l);
      CHECK(cdf.quantile_left(p) >= prev_l);
      prev_l = cdf.quantile_left(p);
      if (p < 1.0) {
        double want_r = grid.back();
        for (double x : grid) {
          if (cdf.cdf(x) > p) {
            want_r = x;
            break;
          }
        }
        CHECK(cdf.quantile_right(p) == want_r);
        CHECK(cdf.quantile_left(p) <= cdf.quantile_right(p));
        CHECK(cdf.quantile_right(p) >= prev_r);
        prev_r = cdf.quantile_right(p);
      }
    }
  }
}
