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

// Bandit simulator: per-arm reward models, Bernoulli contamination and the
// adversary strategies that choose what a contaminated sample looks like.
//
//   observed^d = (1 - B^d) Y^d + B^d Z^d,  B^d ~ Ber(eps)
//
// Randomness lives in ArmStreams, one pair of engines per arm: the reward
// stream draws Y and the contamination stream draws B and Z. Pull order
// across arms therefore never changes an arm's sample sequence, and the
// indicator draws never read the reward stream.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "robust_psi/pareto.hpp"
#include "robust_psi/seeding.hpp"

namespace robust_psi {

struct GaussianArm {
  ObjectiveVector means;
  double sigma;
};

// Finite support: a pull returns one of the points uniformly at random.
struct EmpiricalArm {
  std::vector<ObjectiveVector> points;
};

using ArmModel = std::variant<GaussianArm, EmpiricalArm>;

namespace attack {

// Contamination leaves the sample untouched (Z = Y).
struct None {};

// Z is a constant chosen by whether the arm is Pareto optimal.
struct PointMass {
  double value_optimal;
  double value_suboptimal;
};

// Z = Y + offset, offset chosen by whether the arm is Pareto optimal.
struct Offset {
  double offset_optimal;
  double offset_suboptimal;
};

// Z ~ Uniform[low, high], fixed in advance.
struct UniformOblivious {
  double low;
  double high;
};

// B is coupled with Y: only outcomes above the arm's threshold_quantile are
// contaminated, with probability eps / P(Y > threshold), so the marginal
// contamination rate stays exactly eps. Z = Y + shift.
struct MaliciousCoupled {
  double threshold_quantile;
  double shift;
};

}  // namespace attack

using AdversaryStrategy = std::variant<attack::None, attack::PointMass, attack::Offset,
                                       attack::UniformOblivious, attack::MaliciousCoupled>;

std::string describe(const AdversaryStrategy& s);

struct PullRecord {
  std::size_t arm = 0;
  ObjectiveVector observed;
  std::vector<bool> contaminated_mask;
  // Diagnostics only; algorithms must read `observed`.
  ObjectiveVector true_sample;
};

class ArmStreams {
 public:
  ArmStreams(std::uint64_t seed, std::size_t arms);

  Rng& reward(std::size_t arm) { return reward_.at(arm); }
  Rng& contamination(std::size_t arm) { return contamination_.at(arm); }
  std::size_t arms() const noexcept { return reward_.size(); }

 private:
  std::vector<Rng> reward_;
  std::vector<Rng> contamination_;
};

class Environment {
 public:
  Environment(std::vector<ArmModel> arms, AdversaryStrategy adversary, double epsilon,
              std::uint64_t seed);

  std::size_t arms() const noexcept { return arms_.size(); }
  std::size_t objectives() const noexcept { return objectives_; }
  const ArmModel& arm(std::size_t i) const { return arms_.at(i); }
  const AdversaryStrategy& adversary() const noexcept { return adversary_; }
  double epsilon() const noexcept { return epsilon_; }
  std::uint64_t seed() const noexcept { return seed_; }

  // Median-of-interest matrix of the uncontaminated reward models.
  const MedianMatrix& true_medians() const noexcept { return medians_; }
  const std::vector<std::size_t>& pareto_optimal() const noexcept { return optimal_; }
  bool is_optimal(std::size_t arm) const { return optimal_mask_.at(arm); }

  // Same reward models under another attack.
  Environment with_attack(AdversaryStrategy adversary, double epsilon) const;
  Environment with_seed(std::uint64_t seed) const;

  ArmStreams make_streams() const { return ArmStreams(seed_, arms_.size()); }

  // Threshold and exceedance probability P(Y > threshold) of arm/objective
  // under the malicious strategy. Throw StateError for other strategies.
  double malicious_threshold(std::size_t arm, std::size_t d) const;
  double malicious_exceedance(std::size_t arm, std::size_t d) const;

 private:
  std::vector<ArmModel> arms_;
  AdversaryStrategy adversary_;
  double epsilon_;
  std::uint64_t seed_;
  std::size_t objectives_ = 0;
  MedianMatrix medians_;
  std::vector<std::size_t> optimal_;
  std::vector<bool> optimal_mask_;
  std::vector<std::vector<double>> thresholds_;
  std::vector<std::vector<double>> exceedance_;
};

// One observation of `arm`. Throws DomainError on an invalid arm index.
PullRecord pull(const Environment& env, std::size_t arm, ArmStreams& streams);

MedianMatrix true_medians(const Environment& env);

// K x M means drawn i.i.d. from Uniform[mean_low, mean_high]; Gaussian noise
// with the given sigma; no adversary and eps = 0.
Environment random_gaussian_instance(std::size_t k, std::size_t m, double mean_low,
                                     double mean_high, double sigma, std::uint64_t seed);

struct EmpiricalDataset {
  std::vector<std::string> arm_names;
  std::vector<std::string> objective_names;
  std::vector<ArmModel> arms;
};

// Delimited text with header `arm,obj_1,...,obj_M` (comma, tab or semicolon).
// Arms are indexed in order of first appearance. With `normalize`, every
// objective column is min-max scaled to [0, 1].
EmpiricalDataset parse_empirical(std::istream& in, bool normalize);
EmpiricalDataset read_empirical(const std::filesystem::path& path, bool normalize);

Environment load_empirical(const std::filesystem::path& path, bool normalize,
                           AdversaryStrategy adversary = attack::None{}, double epsilon = 0.0,
                           std::uint64_t seed = 0);

}  // namespace robust_psi
