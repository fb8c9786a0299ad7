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

// Experiment configuration files. INI-style sections:
//
//   [params]       epsilon, delta, alpha, t_bar, sigma, adversary_class
//   [environment]  kind = gaussian|empirical, K, M, mean_range, sigma, means,
//                  dataset_path, normalize
//   [attack]       strategy = none|point_mass|offset|uniform|malicious plus
//                  the strategy's fields
//   [sweep]        epsilons, replications, base_seed, algorithms
//   [limits]       max_total_samples
//
// Lists are comma separated; `means` separates arms with ';'. Unknown sections
// and keys are rejected. Every error message names the offending key.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "robust_psi/core.hpp"
#include "robust_psi/environment.hpp"
#include "robust_psi/eval.hpp"

namespace robust_psi {

enum class EnvironmentKind { kGaussian, kEmpirical };

struct EnvironmentSection {
  EnvironmentKind kind = EnvironmentKind::kGaussian;
  std::size_t k = 10;
  std::size_t m = 2;
  double mean_low = 0.0;
  double mean_high = 10.0;
  double sigma = 0.1;
  std::vector<ObjectiveVector> means;  // fixed Gaussian instance when non-empty
  std::filesystem::path dataset_path;
  bool normalize = false;
};

struct SweepSection {
  std::vector<double> epsilons;
  std::size_t replications = 10;
  std::uint64_t base_seed = 0;
  std::vector<Algorithm> algorithms{Algorithm::kRpsi, Algorithm::kBaseline};
};

struct RunConfigFile {
  RobustParams params;
  EnvironmentSection environment;
  AdversaryStrategy attack = attack::None{};
  std::optional<SweepSection> sweep;
  std::optional<std::int64_t> max_total_samples;
};

// Relative dataset paths resolve against `base_dir`.
RunConfigFile parse_run_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfigFile load_run_config(const std::filesystem::path& path);

// Serializes a config in the same format (round-trips through parse_run_config).
std::string render_run_config(const RunConfigFile& config);

// Uncontaminated instance per replication seed. Fixed instances ignore the seed.
InstanceFactory make_instance_factory(const EnvironmentSection& env);

SweepSpec make_sweep_spec(const RunConfigFile& config, unsigned jobs);

}  // namespace robust_psi
