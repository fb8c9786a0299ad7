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

#include "robust_psi/environment.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "robust_psi/core.hpp"
#include "robust_psi/errors.hpp"

namespace robust_psi {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// 53-bit uniform on [0, 1).
double unit_uniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Box-Muller, one variate per call.
double standard_normal(Rng& rng) {
  const double u1 = 1.0 - unit_uniform(rng);
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t arm_objectives(const ArmModel& arm) {
  return std::visit(Overloaded{[](const GaussianArm& g) { return g.means.size(); },
                               [](const EmpiricalArm& e) {
                                 return e.points.empty() ? std::size_t{0} : e.points.front().size();
                               }},
                    arm);
}

std::vector<double> column(const EmpiricalArm& arm, std::size_t d) {
  std::vector<double> out;
  out.reserve(arm.points.size());
  for (const auto& p : arm.points) out.push_back(p[d]);
  return out;
}

ObjectiveVector draw_true(const ArmModel& model, Rng& rng) {
  return std::visit(
      Overloaded{[&](const GaussianArm& g) {
                   ObjectiveVector y(g.means.size());
                   for (std::size_t d = 0; d < y.size(); ++d) {
                     y[d] = g.means[d] + g.sigma * standard_normal(rng);
                   }
                   return y;
                 },
                 [&](const EmpiricalArm& e) {
                   const auto n = static_cast<std::uint64_t>(e.points.size());
                   // Rejection keeps the index exactly uniform.
                   const std::uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
                   std::uint64_t r = rng();
                   while (r > limit) r = rng();
                   return e.points[static_cast<std::size_t>(r % n)];
                 }},
      model);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

}  // namespace

std::string describe(const AdversaryStrategy& s) {
  std::ostringstream os;
  std::visit(Overloaded{[&](const attack::None&) { os << "none"; },
                        [&](const attack::PointMass& a) {
                          os << "point_mass(optimal=" << a.value_optimal
                             << ", suboptimal=" << a.value_suboptimal << ")";
                        },
                        [&](const attack::Offset& a) {
                          os << "offset(optimal=" << a.offset_optimal
                             << ", suboptimal=" << a.offset_suboptimal << ")";
                        },
                        [&](const attack::UniformOblivious& a) {
                          os << "uniform(" << a.low << ", " << a.high << ")";
                        },
                        [&](const attack::MaliciousCoupled& a) {
                          os << "malicious(quantile=" << a.threshold_quantile
                             << ", shift=" << a.shift << ")";
                        }},
             s);
  return os.str();
}

ArmStreams::ArmStreams(std::uint64_t seed, std::size_t arms) {
  reward_.reserve(arms);
  contamination_.reserve(arms);
  for (std::size_t i = 0; i < arms; ++i) {
    reward_.emplace_back(combine_seed({seed, i, 0x7265776172645fULL}));
    contamination_.emplace_back(combine_seed({seed, i, 0x636f6e74616dULL}));
  }
}

Environment::Environment(std::vector<ArmModel> arms, AdversaryStrategy adversary,
                         double epsilon, std::uint64_t seed)
    : arms_(std::move(arms)), adversary_(adversary), epsilon_(epsilon), seed_(seed) {
  if (arms_.empty()) throw DomainError("environment needs at least one arm");
  if (!(epsilon_ >= 0.0) || !(epsilon_ < 0.5)) {
    throw DomainError("contamination probability epsilon must lie in [0, 1/2)");
  }
  objectives_ = arm_objectives(arms_.front());
  if (objectives_ == 0) throw DomainError("environment needs at least one objective");

  std::vector<ObjectiveVector> rows;
  rows.reserve(arms_.size());
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    const auto& model = arms_[i];
    if (arm_objectives(model) != objectives_) {
      throw DomainError("arm " + std::to_string(i) + " has a different objective count");
    }
    ObjectiveVector row(objectives_);
    if (const auto* g = std::get_if<GaussianArm>(&model)) {
      if (!(g->sigma > 0.0)) throw DomainError("Gaussian arm sigma must be positive");
      row = g->means;
    } else {
      const auto& e = std::get<EmpiricalArm>(model);
      for (const auto& p : e.points) {
        if (p.size() != objectives_) throw DomainError("empirical arm point has wrong length");
      }
      for (std::size_t d = 0; d < objectives_; ++d) {
        row[d] = EmpiricalCdf(column(e, d)).median_of_interest();
      }
    }
    rows.push_back(std::move(row));
  }
  medians_ = MedianMatrix(std::move(rows));
  optimal_ = pareto_front(medians_);
  optimal_mask_.assign(arms_.size(), false);
  for (std::size_t i : optimal_) optimal_mask_[i] = true;

  if (const auto* u = std::get_if<attack::UniformOblivious>(&adversary_)) {
    if (!(u->low < u->high)) throw DomainError("uniform attack requires low < high");
  }
  if (const auto* mal = std::get_if<attack::MaliciousCoupled>(&adversary_)) {
    const double q = mal->threshold_quantile;
    if (!(q >= 0.0) || !(q < 1.0)) {
      throw DomainError("malicious threshold_quantile must lie in [0, 1)");
    }
    thresholds_.assign(arms_.size(), std::vector<double>(objectives_));
    exceedance_.assign(arms_.size(), std::vector<double>(objectives_));
    for (std::size_t i = 0; i < arms_.size(); ++i) {
      for (std::size_t d = 0; d < objectives_; ++d) {
        double thr = 0.0;
        double tail = 0.0;
        if (const auto* g = std::get_if<GaussianArm>(&arms_[i])) {
          thr = q == 0.0 ? -std::numeric_limits<double>::infinity()
                         : boost::math::quantile(boost::math::normal(g->means[d], g->sigma), q);
          tail = 1.0 - q;
        } else {
          const EmpiricalCdf cdf(column(std::get<EmpiricalArm>(arms_[i]), d));
          thr = q == 0.0 ? -std::numeric_limits<double>::infinity() : cdf.quantile_left(q);
          tail = q == 0.0 ? 1.0 : 1.0 - cdf.cdf(thr);
        }
        if (epsilon_ > tail) {
          throw DomainError("malicious attack budget: epsilon exceeds P(Y > threshold) = " +
                            std::to_string(tail) + " for arm " + std::to_string(i));
        }
        thresholds_[i][d] = thr;
        exceedance_[i][d] = tail;
      }
    }
  }
}

Environment Environment::with_attack(AdversaryStrategy adversary, double epsilon) const {
  return Environment(arms_, adversary, epsilon, seed_);
}

Environment Environment::with_seed(std::uint64_t seed) const {
  Environment copy = *this;
  copy.seed_ = seed;
  return copy;
}

double Environment::malicious_threshold(std::size_t arm, std::size_t d) const {
  if (thresholds_.empty()) throw StateError("environment has no malicious attack");
  return thresholds_.at(arm).at(d);
}

double Environment::malicious_exceedance(std::size_t arm, std::size_t d) const {
  if (exceedance_.empty()) throw StateError("environment has no malicious attack");
  return exceedance_.at(arm).at(d);
}

PullRecord pull(const Environment& env, std::size_t arm, ArmStreams& streams) {
  if (arm >= env.arms()) {
    throw DomainError("pull: arm index " + std::to_string(arm) + " out of range");
  }
  if (streams.arms() != env.arms()) throw DomainError("pull: stream count does not match arms");

  PullRecord rec;
  rec.arm = arm;
  rec.true_sample = draw_true(env.arm(arm), streams.reward(arm));
  rec.observed = rec.true_sample;
  const std::size_t m = env.objectives();
  rec.contaminated_mask.assign(m, false);
  Rng& rng = streams.contamination(arm);
  const double eps = env.epsilon();
  const bool optimal = env.is_optimal(arm);

  for (std::size_t d = 0; d < m; ++d) {
    const double y = rec.true_sample[d];
    // One indicator uniform per objective, drawn whatever the strategy.
    const double u = unit_uniform(rng);
    std::visit(Overloaded{[&](const attack::None&) { rec.contaminated_mask[d] = u < eps; },
                          [&](const attack::PointMass& a) {
                            if (u < eps) {
                              rec.contaminated_mask[d] = true;
                              rec.observed[d] = optimal ? a.value_optimal : a.value_suboptimal;
                            }
                          },
                          [&](const attack::Offset& a) {
                            if (u < eps) {
                              rec.contaminated_mask[d] = true;
                              rec.observed[d] = y + (optimal ? a.offset_optimal : a.offset_suboptimal);
                            }
                          },
                          [&](const attack::UniformOblivious& a) {
                            const double z = a.low + (a.high - a.low) * unit_uniform(rng);
                            if (u < eps) {
                              rec.contaminated_mask[d] = true;
                              rec.observed[d] = z;
                            }
                          },
                          [&](const attack::MaliciousCoupled& a) {
                            const double tail = env.malicious_exceedance(arm, d);
                            const double p = tail > 0.0 ? std::min(1.0, eps / tail) : 0.0;
                            if (y > env.malicious_threshold(arm, d) && u < p) {
                              rec.contaminated_mask[d] = true;
                              rec.observed[d] = y + a.shift;
                            }
                          }},
               env.adversary());
  }
  return rec;
}

MedianMatrix true_medians(const Environment& env) { return env.true_medians(); }

Environment random_gaussian_instance(std::size_t k, std::size_t m, double mean_low,
                                     double mean_high, double sigma, std::uint64_t seed) {
  if (k == 0 || m == 0) throw DomainError("random_gaussian_instance: K and M must be >= 1");
  if (!(mean_low < mean_high) || !std::isfinite(mean_low) || !std::isfinite(mean_high)) {
    throw DomainError("random_gaussian_instance: mean_low must be below mean_high");
  }
  if (!(sigma > 0.0)) throw DomainError("random_gaussian_instance: sigma must be positive");
  Rng rng(combine_seed({seed, 0x696e7374616e6365ULL}));
  std::vector<ArmModel> arms;
  arms.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    ObjectiveVector means(m);
    for (double& v : means) v = mean_low + (mean_high - mean_low) * unit_uniform(rng);
    arms.emplace_back(GaussianArm{std::move(means), sigma});
  }
  return Environment(std::move(arms), attack::None{}, 0.0, seed);
}

EmpiricalDataset parse_empirical(std::istream& in, bool normalize) {
  std::string line;
  std::size_t line_no = 0;
  // Header, skipping blank lines.
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    line.clear();
  }
  if (line.empty()) throw IngestionError(0, "dataset is empty (missing header)");
  char delim = ',';
  if (line.find(',') == std::string::npos) {
    if (line.find('\t') != std::string::npos) {
      delim = '\t';
    } else if (line.find(';') != std::string::npos) {
      delim = ';';
    }
  }
  const auto header = split_line(line, delim);
  if (header.size() < 2) {
    throw IngestionError(line_no, "header must be `arm,obj_1,...,obj_M` with M >= 1");
  }
  EmpiricalDataset ds;
  ds.objective_names.assign(header.begin() + 1, header.end());
  const std::size_t m = ds.objective_names.size();

  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<ObjectiveVector>> points;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_line(line, delim);
    if (fields.size() != m + 1) {
      throw IngestionError(line_no, "expected " + std::to_string(m + 1) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw IngestionError(line_no, "empty arm identifier");
    ObjectiveVector row(m);
    for (std::size_t d = 0; d < m; ++d) {
      const std::string& f = fields[d + 1];
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(f, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (f.empty() || used != f.size() || !std::isfinite(v)) {
        throw IngestionError(line_no, "objective '" + ds.objective_names[d] +
                                          "' is not a finite number: '" + f + "'");
      }
      row[d] = v;
    }
    auto [it, inserted] = index.emplace(fields[0], ds.arm_names.size());
    if (inserted) {
      ds.arm_names.push_back(fields[0]);
      points.emplace_back();
    }
    points[it->second].push_back(std::move(row));
  }
  if (ds.arm_names.empty()) throw IngestionError(0, "dataset has no data rows");

  if (normalize) {
    for (std::size_t d = 0; d < m; ++d) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& arm : points) {
        for (const auto& p : arm) {
          lo = std::min(lo, p[d]);
          hi = std::max(hi, p[d]);
        }
      }
      if (!(hi > lo)) {
        throw IngestionError(0, "cannot normalize constant objective '" +
                                    ds.objective_names[d] + "'");
      }
      for (auto& arm : points) {
        for (auto& p : arm) p[d] = (p[d] - lo) / (hi - lo);
      }
    }
  }
  for (auto& arm : points) ds.arms.emplace_back(EmpiricalArm{std::move(arm)});
  return ds;
}

EmpiricalDataset read_empirical(const std::filesystem::path& path, bool normalize) {
  std::ifstream in(path);
  if (!in) throw IngestionError(0, "cannot open dataset '" + path.string() + "'");
  return parse_empirical(in, normalize);
}

Environment load_empirical(const std::filesystem::path& path, bool normalize,
                           AdversaryStrategy adversary, double epsilon, std::uint64_t seed) {
  auto ds = read_empirical(path, normalize);
  return Environment(std::move(ds.arms), adversary, epsilon, seed);
}

}  // namespace robust_psi
