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

#include "robust_psi/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "robust_psi/errors.hpp"

namespace robust_psi {
namespace {

using Real = long double;

constexpr Real kPi = std::numbers::pi_v<long double>;

Real r_ext(Real sigma, Real t) {
  return sigma * std::sqrt(Real{2}) *
         (std::sqrt(std::log(Real{1} / (Real{0.5} - t))) + std::sqrt(std::log(Real{2})));
}

Real h_value(AdversaryClass c, double epsilon) {
  if (!(epsilon >= 0.0) || !(epsilon < 0.5)) {
    throw DomainError("contamination probability epsilon must lie in [0, 1/2), got " +
                      std::to_string(epsilon));
  }
  const Real e = epsilon;
  if (c == AdversaryClass::kMalicious) return e;
  return e / (Real{2} * (Real{1} - e));
}

Real beta_value(double t_bar, double epsilon, AdversaryClass c) {
  if (!(t_bar > 0.0) || !(t_bar < 0.5)) {
    throw DomainError("t_bar must lie in (0, 1/2), got " + std::to_string(t_bar));
  }
  const Real h = h_value(c, epsilon);
  if (!(h < static_cast<Real>(t_bar))) {
    throw AdmissibilityError(
        c == AdversaryClass::kMalicious
            ? "inadmissible parameters: malicious adversary requires epsilon < t_bar"
            : "inadmissible parameters: oblivious/prescient adversary requires "
              "epsilon < 2 t_bar / (1 + 2 t_bar)");
  }
  const Real gap = static_cast<Real>(t_bar) - h;
  return Real{1} / (gap * gap);
}

// log(pi^2 M K scale / (6 delta_tilde)).
Real union_log(const RobustParams& p, std::size_t k, std::size_t m, Real scale) {
  return std::log(kPi * kPi * static_cast<Real>(m) * static_cast<Real>(k) * scale /
                  (Real{6} * p.delta_tilde_ext()));
}

std::int64_t ceil_to_int(Real x) { return static_cast<std::int64_t>(std::ceil(x)); }

// Per-arm sample budget after tau rounds: 2 tau (beta log(tau^2 M K pi^2 / (6 dt)) + 1).
Real per_arm_bound(const RobustParams& p, std::int64_t tau, std::size_t k, std::size_t m) {
  const Real t = static_cast<Real>(tau);
  return Real{2} * t * (p.beta_ext() * union_log(p, k, m, t * t) + Real{1});
}

void check_probability(double v, const char* name, bool open_low, bool open_high) {
  const bool low_ok = open_low ? v > 0.0 : v >= 0.0;
  const bool high_ok = open_high ? v < 1.0 : v <= 1.0;
  if (!std::isfinite(v) || !low_ok || !high_ok) {
    throw DomainError(std::string(name) + " must lie in " + (open_low ? "(0" : "[0") + ", 1" +
                      (open_high ? ")" : "]") + ", got " + std::to_string(v));
  }
}

}  // namespace

std::string_view to_string(AdversaryClass c) {
  switch (c) {
    case AdversaryClass::kOblivious: return "oblivious";
    case AdversaryClass::kPrescient: return "prescient";
    case AdversaryClass::kMalicious: return "malicious";
  }
  return "unknown";
}

AdversaryClass parse_adversary_class(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "oblivious") return AdversaryClass::kOblivious;
  if (lower == "prescient") return AdversaryClass::kPrescient;
  if (lower == "malicious") return AdversaryClass::kMalicious;
  throw DomainError("unknown adversary class '" + std::string(name) +
                    "' (expected oblivious, prescient or malicious)");
}

double subgaussian_r(double sigma, double t) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("subgaussian_r: sigma must be positive");
  }
  if (!(t >= 0.0) || !(t < 0.5)) {
    throw DomainError("subgaussian_r: t must lie in [0, 1/2), got " + std::to_string(t));
  }
  return static_cast<double>(r_ext(sigma, t));
}

double h_epsilon(AdversaryClass c, double epsilon) {
  return static_cast<double>(h_value(c, epsilon));
}

double beta(double t_bar, double epsilon, AdversaryClass c) {
  return static_cast<double>(beta_value(t_bar, epsilon, c));
}

RobustParams::RobustParams(double epsilon, double delta, double alpha, double t_bar,
                           double sigma, AdversaryClass adversary_class)
    : epsilon_(epsilon),
      delta_(delta),
      alpha_(alpha),
      t_bar_(t_bar),
      sigma_(sigma),
      class_(adversary_class) {
  check_probability(delta, "delta", true, true);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw DomainError("alpha must be a finite nonnegative number");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be a finite positive number");
  }
  h_eps_ = h_value(class_, epsilon_);
  beta_ = beta_value(t_bar_, epsilon_, class_);
  delta_tilde_ = static_cast<Real>(delta_) / (class_ == AdversaryClass::kMalicious ? 3 : 2);
  // Adversary-free convention: no contamination means no unavoidable bias.
  bias_d_ = epsilon_ == 0.0 ? 0.0 : static_cast<double>(r_ext(sigma_, h_eps_));
}

RobustParams RobustParams::with_alpha(double alpha) const {
  return RobustParams(epsilon_, delta_, alpha, t_bar_, sigma_, class_);
}

RobustParams RobustParams::with_epsilon(double epsilon) const {
  return RobustParams(epsilon, delta_, alpha_, t_bar_, sigma_, class_);
}

double bias_d(const RobustParams& params) { return params.bias_d(); }

double stat_bias_u(const RobustParams& params, std::int64_t tau) {
  if (tau < 1) throw DomainError("stat_bias_u: tau must be >= 1");
  const Real h = params.h_eps_ext();
  const Real shifted =
      h + Real{1} / std::sqrt(params.beta_ext() * static_cast<Real>(tau));
  if (!(shifted < Real{0.5})) return std::numeric_limits<double>::infinity();
  const Real sigma = params.sigma();
  return static_cast<double>(r_ext(sigma, shifted) - r_ext(sigma, h));
}

std::int64_t init_samples_n0(const RobustParams& params, std::size_t k, std::size_t m) {
  if (k == 0 || m == 0) throw DomainError("init_samples_n0: K and M must be >= 1");
  const Real n0 = Real{2} * params.beta_ext() * union_log(params, k, m, 1);
  return std::max<std::int64_t>(1, ceil_to_int(n0));
}

std::int64_t round_samples_n(const RobustParams& params, std::int64_t tau, std::size_t k,
                             std::size_t m) {
  if (tau < 2) throw DomainError("round_samples_n: tau must be >= 2 (round 1 uses n0)");
  if (k == 0 || m == 0) throw DomainError("round_samples_n: K and M must be >= 1");
  const Real b = params.beta_ext();
  const Real t = static_cast<Real>(tau);
  const Real prev = t - 1;
  const Real body = Real{4} * t * b * std::log1p(Real{1} / prev) +
                    Real{2} * b * union_log(params, k, m, prev * prev);
  return 1 + ceil_to_int(body);
}

std::int64_t tau_threshold(const RobustParams& params, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("tau_threshold: a must be a finite positive number");
  }
  const double target = a / 4.0;
  auto ok = [&](std::int64_t tau) { return stat_bias_u(params, tau) <= target; };
  if (ok(1)) return 1;
  // U is strictly decreasing: gallop to a bracket (lo fails, hi passes), then bisect.
  std::int64_t lo = 1;
  std::int64_t hi = 2;
  while (!ok(hi)) {
    lo = hi;
    if (hi > std::numeric_limits<std::int64_t>::max() / 2) {
      throw DomainError("tau_threshold: threshold unreachable in 64-bit range");
    }
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

SampleBound theoretical_sample_bound(const RobustParams& params, std::span<const double> gaps,
                                     std::size_t m) {
  const std::size_t k = gaps.size();
  if (k == 0 || m == 0) throw DomainError("theoretical_sample_bound: K and M must be >= 1");
  const double d = params.bias_d();
  const double alpha = params.alpha();
  const std::int64_t tau_alpha = tau_threshold(params, alpha);
  const Real alpha_term = per_arm_bound(params, tau_alpha, k, m);

  Real gap_dependent = 0;
  for (double gap : gaps) {
    if (!(gap >= 0.0)) throw DomainError("theoretical_sample_bound: gaps must be >= 0");
    if (gap > 4.0 * d + alpha) {
      const std::int64_t tau_gap = tau_threshold(params, gap - 4.0 * d);
      gap_dependent += per_arm_bound(params, tau_gap, k, m);
    } else {
      gap_dependent += alpha_term;
    }
  }
  const Real t = static_cast<Real>(tau_alpha);
  const Real gap_free =
      static_cast<Real>(k) * t *
      (Real{2} * params.beta_ext() * union_log(params, k, m, t * t) + Real{2});
  return {ceil_to_int(gap_dependent), ceil_to_int(gap_free), tau_alpha};
}

double empirical_median(std::span<const double> samples) {
  if (samples.empty()) throw DomainError("empirical_median: empty sample");
  std::vector<double> v(samples.begin(), samples.end());
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return lower + (upper - lower) / 2.0;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> points) : support_(std::move(points)) {
  if (support_.empty()) throw DomainError("EmpiricalCdf: empty support");
  for (double x : support_) {
    if (!std::isfinite(x)) throw DomainError("EmpiricalCdf: non-finite support point");
  }
  std::sort(support_.begin(), support_.end());
}

double EmpiricalCdf::cdf(double x) const {
  const auto count = std::upper_bound(support_.begin(), support_.end(), x) - support_.begin();
  return static_cast<double>(count) / static_cast<double>(support_.size());
}

// Both quantiles search the smallest order statistic index k (1-based) whose
// cumulative mass k/n satisfies the predicate. F only jumps at support points,
// so the infimum is always attained at one of them.
double EmpiricalCdf::quantile_left(double p) const {
  if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("quantile_left: p must lie in [0, 1]");
  const std::size_t n = support_.size();
  const double nd = static_cast<double>(n);
  std::size_t lo = 1;
  std::size_t hi = n;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (static_cast<double>(mid) / nd >= p) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return support_[lo - 1];
}

double EmpiricalCdf::quantile_right(double p) const {
  if (!(p >= 0.0) || !(p < 1.0)) throw DomainError("quantile_right: p must lie in [0, 1)");
  const std::size_t n = support_.size();
  const double nd = static_cast<double>(n);
  std::size_t lo = 1;
  std::size_t hi = n;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (static_cast<double>(mid) / nd > p) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return support_[lo - 1];
}

double EmpiricalCdf::median_of_interest() const {
  const double l = quantile_left(0.5);
  const double r = quantile_right(0.5);
  return l + (r - l) / 2.0;
}

}  // namespace robust_psi
