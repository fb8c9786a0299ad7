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

// Scalar kernel of the robust Pareto set identification algorithm: quantiles
// and medians, the subgaussian quantile-deviation bound R(t), and every
// sampling-schedule and sample-complexity formula built on top of it.
//
// All logarithms are natural. Formulas are evaluated in long double and
// ceilings are taken on the extended-precision value.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace robust_psi {

enum class AdversaryClass { kOblivious, kPrescient, kMalicious };

std::string_view to_string(AdversaryClass c);
// Accepts "oblivious", "prescient", "malicious" (case-insensitive).
AdversaryClass parse_adversary_class(std::string_view name);

// R(t) = sigma * sqrt(2) * (sqrt(log(1 / (1/2 - t))) + sqrt(log 2)).
// Bounds the distance between the median and the (1/2 +- t)-quantiles of any
// sigma-subgaussian distribution. Requires 0 <= t < 1/2 and sigma > 0.
double subgaussian_r(double sigma, double t);

// Contamination level that shifts the median quantile: eps / (2(1 - eps)) when
// the contamination indicator is independent of the reward, eps otherwise.
double h_epsilon(AdversaryClass c, double epsilon);

// (t_bar - h_eps)^-2. Throws AdmissibilityError when h_eps >= t_bar.
double beta(double t_bar, double epsilon, AdversaryClass c);

// Validated algorithm constants plus the quantities derived from them.
class RobustParams {
 public:
  RobustParams(double epsilon, double delta, double alpha, double t_bar,
               double sigma, AdversaryClass adversary_class);

  double epsilon() const noexcept { return epsilon_; }
  double delta() const noexcept { return delta_; }
  double alpha() const noexcept { return alpha_; }
  double t_bar() const noexcept { return t_bar_; }
  double sigma() const noexcept { return sigma_; }
  AdversaryClass adversary_class() const noexcept { return class_; }

  double h_eps() const noexcept { return static_cast<double>(h_eps_); }
  double beta() const noexcept { return static_cast<double>(beta_); }
  // delta / 2 for oblivious and prescient adversaries, delta / 3 for malicious.
  double delta_tilde() const noexcept { return static_cast<double>(delta_tilde_); }

  // Extended-precision views used by the schedule formulas.
  long double h_eps_ext() const noexcept { return h_eps_; }
  long double beta_ext() const noexcept { return beta_; }
  long double delta_tilde_ext() const noexcept { return delta_tilde_; }
  // Unavoidable bias R(h_eps); exactly 0 in the adversary-free case.
  double bias_d() const noexcept { return bias_d_; }

  // Same parameters with a different accuracy target.
  RobustParams with_alpha(double alpha) const;
  RobustParams with_epsilon(double epsilon) const;

 private:
  double epsilon_;
  double delta_;
  double alpha_;
  double t_bar_;
  double sigma_;
  AdversaryClass class_;
  long double h_eps_;
  long double beta_;
  long double delta_tilde_;
  double bias_d_;
};

double bias_d(const RobustParams& params);

// U_tau = R(h_eps + 1/sqrt(beta tau)) - R(h_eps). Returns +infinity when the
// shifted quantile level reaches 1/2, i.e. "no confidence yet".
double stat_bias_u(const RobustParams& params, std::int64_t tau);

// ceil(2 beta log(pi^2 M K / (6 delta_tilde))).
std::int64_t init_samples_n0(const RobustParams& params, std::size_t k, std::size_t m);

// Batch size of sampling round tau >= 2:
// 1 + ceil(4 tau beta log(tau/(tau-1)) + 2 beta log((tau-1)^2 M K pi^2 / (6 delta_tilde))).
std::int64_t round_samples_n(const RobustParams& params, std::int64_t tau,
                             std::size_t k, std::size_t m);

// Smallest tau >= 1 with U_tau <= a/4.
std::int64_t tau_threshold(const RobustParams& params, double a);

struct SampleBound {
  std::int64_t gap_dependent;
  std::int64_t gap_free;
  std::int64_t tau_alpha;
};

// High-probability bounds on the total number of samples. `gaps` holds one
// suboptimality gap per arm (K = gaps.size()). Both values are ceilings of
// the real-valued expressions.
SampleBound theoretical_sample_bound(const RobustParams& params,
                                     std::span<const double> gaps, std::size_t m);

// Middle order statistic for odd n, mean of the two middle ones for even n.
double empirical_median(std::span<const double> samples);

// Empirical distribution of a finite multiset. F(x) = #{points <= x} / n.
// Quantiles are taken over the support; no interpolation.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> points);

  double cdf(double x) const;
  // inf{x : F(x) >= p}, p in [0, 1].
  double quantile_left(double p) const;
  // inf{x : F(x) > p}, p in [0, 1).
  double quantile_right(double p) const;
  // (Q_R(1/2) + Q_L(1/2)) / 2.
  double median_of_interest() const;

  std::span<const double> support() const noexcept { return support_; }

 private:
  std::vector<double> support_;
};

struct GaussianDistribution {
  double mean;
  double sigma;
};

inline double median_of_interest(const EmpiricalCdf& cdf) { return cdf.median_of_interest(); }
inline double median_of_interest(const GaussianDistribution& g) { return g.mean; }

}  // namespace robust_psi
