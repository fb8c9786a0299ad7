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

#include "robust_psi/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "robust_psi/errors.hpp"

namespace robust_psi {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"params", {"epsilon", "delta", "alpha", "t_bar", "sigma", "adversary_class"}},
      {"environment",
       {"kind", "K", "M", "mean_range", "sigma", "means", "dataset_path", "normalize"}},
      {"attack",
       {"strategy", "value_optimal", "value_suboptimal", "offset_optimal", "offset_suboptimal",
        "low", "high", "threshold_quantile", "shift"}},
      {"sweep", {"epsilons", "replications", "base_seed", "algorithms"}},
      {"limits", {"max_total_samples"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string body = trim(s);
  if (!body.empty() && body.front() == '[' && body.back() == ']') {
    body = body.substr(1, body.size() - 2);
  }
  if (trim(body).empty()) return out;
  std::istringstream ss(body);
  std::string item;
  while (std::getline(ss, item, delim)) out.push_back(trim(item));
  return out;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool present() const { return tree_ != nullptr; }
  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ConfigError("[" + name_ + "]." + key + ": " + why);
  }

  std::string raw(const std::string& key) const {
    if (!has(key)) fail(key, "missing required key");
    return trim(tree_->get<std::string>(key));
  }

  double real(const std::string& key) const { return parse_real(key, raw(key)); }
  double real_or(const std::string& key, double fallback) const {
    return has(key) ? real(key) : fallback;
  }

  std::uint64_t unsigned_int(const std::string& key) const {
    const std::string s = raw(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      fail(key, "expected a nonnegative integer, got '" + s + "'");
    }
    return v;
  }

  bool boolean(const std::string& key) const {
    std::string s = raw(key);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(key, "expected true or false, got '" + s + "'");
  }

  std::vector<double> reals(const std::string& key, char delim = ',') const {
    std::vector<double> out;
    for (const auto& item : split_list(raw(key), delim)) out.push_back(parse_real(key, item));
    return out;
  }

  double parse_real(const std::string& key, const std::string& s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail(key, "expected a finite number, got '" + s + "'");
    }
    return v;
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

Section section(const pt::ptree& root, const std::string& name) {
  const auto it = root.find(name);
  return Section(it == root.not_found() ? nullptr : &it->second, name);
}

RobustParams parse_params(const Section& s, double epsilon_override, bool use_override) {
  if (!s.present()) throw ConfigError("[params]: missing required section");
  const double epsilon = use_override ? epsilon_override : s.real("epsilon");
  const double delta = s.real("delta");
  const double alpha = s.real("alpha");
  const double t_bar = s.real("t_bar");
  const double sigma = s.real("sigma");
  AdversaryClass cls = AdversaryClass::kPrescient;
  if (s.has("adversary_class")) {
    try {
      cls = parse_adversary_class(s.raw("adversary_class"));
    } catch (const DomainError& e) {
      s.fail("adversary_class", e.what());
    }
  }
  if (!(epsilon >= 0.0) || !(epsilon < 0.5)) {
    s.fail("epsilon", "contamination probability must lie in [0, 1/2), got " +
                          std::to_string(epsilon));
  }
  if (!(delta > 0.0) || !(delta < 1.0)) s.fail("delta", "must lie in (0, 1)");
  if (!(alpha >= 0.0)) s.fail("alpha", "must be nonnegative");
  if (!(t_bar > 0.0) || !(t_bar < 0.5)) s.fail("t_bar", "must lie in (0, 1/2)");
  if (!(sigma > 0.0)) s.fail("sigma", "must be positive");
  try {
    return RobustParams(epsilon, delta, alpha, t_bar, sigma, cls);
  } catch (const AdmissibilityError&) {
    s.fail("epsilon", cls == AdversaryClass::kMalicious
                          ? "sample complexity guarantee requires epsilon < t_bar for the "
                            "malicious adversary (epsilon = " + std::to_string(epsilon) +
                                ", t_bar = " + std::to_string(t_bar) + ")"
                          : "sample complexity guarantee requires epsilon < 2 t_bar / (1 + 2 "
                            "t_bar) for oblivious and prescient adversaries (epsilon = " +
                                std::to_string(epsilon) + ", t_bar = " + std::to_string(t_bar) +
                                ")");
  }
}

EnvironmentSection parse_environment(const Section& s, const std::filesystem::path& base_dir) {
  if (!s.present()) throw ConfigError("[environment]: missing required section");
  EnvironmentSection env;
  const std::string kind = s.has("kind") ? s.raw("kind") : "gaussian";
  if (kind == "gaussian") {
    env.kind = EnvironmentKind::kGaussian;
  } else if (kind == "empirical") {
    env.kind = EnvironmentKind::kEmpirical;
  } else {
    s.fail("kind", "expected gaussian or empirical, got '" + kind + "'");
  }

  if (env.kind == EnvironmentKind::kEmpirical) {
    if (!s.has("dataset_path")) s.fail("dataset_path", "required for kind = empirical");
    env.dataset_path = s.raw("dataset_path");
    if (env.dataset_path.is_relative() && !base_dir.empty()) {
      env.dataset_path = base_dir / env.dataset_path;
    }
    if (s.has("normalize")) env.normalize = s.boolean("normalize");
    for (const char* key : {"K", "M", "mean_range", "sigma", "means"}) {
      if (s.has(key)) s.fail(key, "only valid for kind = gaussian");
    }
    return env;
  }

  for (const char* key : {"dataset_path", "normalize"}) {
    if (s.has(key)) s.fail(key, "only valid for kind = empirical");
  }
  env.sigma = s.real("sigma");
  if (!(env.sigma > 0.0)) s.fail("sigma", "must be positive");
  if (s.has("means")) {
    for (const auto& row : split_list(s.raw("means"), ';')) {
      ObjectiveVector v;
      for (const auto& item : split_list(row, ',')) v.push_back(s.parse_real("means", item));
      if (v.empty()) s.fail("means", "empty arm row");
      if (!env.means.empty() && v.size() != env.means.front().size()) {
        s.fail("means", "rows must all have the same number of objectives");
      }
      env.means.push_back(std::move(v));
    }
    if (env.means.empty()) s.fail("means", "no arms given");
    env.k = env.means.size();
    env.m = env.means.front().size();
    if (s.has("K") && s.unsigned_int("K") != env.k) s.fail("K", "disagrees with the means rows");
    if (s.has("M") && s.unsigned_int("M") != env.m) s.fail("M", "disagrees with the means rows");
  } else {
    env.k = s.unsigned_int("K");
    env.m = s.unsigned_int("M");
    if (env.k == 0) s.fail("K", "must be >= 1");
    if (env.m == 0) s.fail("M", "must be >= 1");
    const auto range = s.reals("mean_range");
    if (range.size() != 2) s.fail("mean_range", "expected two numbers `low, high`");
    env.mean_low = range[0];
    env.mean_high = range[1];
    if (!(env.mean_low < env.mean_high)) s.fail("mean_range", "low must be below high");
  }
  return env;
}

AdversaryStrategy parse_attack(const Section& s) {
  if (!s.present()) return attack::None{};
  const std::string strategy = s.has("strategy") ? s.raw("strategy") : "none";
  std::set<std::string> used{"strategy"};
  auto real = [&](const std::string& key) {
    used.insert(key);
    return s.real(key);
  };
  AdversaryStrategy out = attack::None{};
  if (strategy == "none") {
    out = attack::None{};
  } else if (strategy == "point_mass") {
    out = attack::PointMass{real("value_optimal"), real("value_suboptimal")};
  } else if (strategy == "offset") {
    out = attack::Offset{real("offset_optimal"), real("offset_suboptimal")};
  } else if (strategy == "uniform") {
    const double low = real("low");
    const double high = real("high");
    if (!(low < high)) s.fail("low", "must be below high");
    out = attack::UniformOblivious{low, high};
  } else if (strategy == "malicious") {
    const double q = real("threshold_quantile");
    if (!(q >= 0.0) || !(q < 1.0)) s.fail("threshold_quantile", "must lie in [0, 1)");
    out = attack::MaliciousCoupled{q, real("shift")};
  } else {
    s.fail("strategy", "expected none, point_mass, offset, uniform or malicious, got '" +
                           strategy + "'");
  }
  for (const auto& key : allowed_keys().at("attack")) {
    if (s.has(key) && used.count(key) == 0) {
      s.fail(key, "not used by strategy '" + strategy + "'");
    }
  }
  return out;
}

SweepSection parse_sweep(const Section& s) {
  SweepSection sweep;
  sweep.epsilons = s.reals("epsilons");
  if (sweep.epsilons.empty()) s.fail("epsilons", "must list at least one value");
  if (s.has("replications")) sweep.replications = s.unsigned_int("replications");
  if (s.has("base_seed")) sweep.base_seed = s.unsigned_int("base_seed");
  if (s.has("algorithms")) {
    sweep.algorithms.clear();
    for (const auto& name : split_list(s.raw("algorithms"), ',')) {
      try {
        sweep.algorithms.push_back(parse_algorithm(name));
      } catch (const DomainError& e) {
        s.fail("algorithms", e.what());
      }
    }
    if (sweep.algorithms.empty()) s.fail("algorithms", "must list at least one algorithm");
  }
  return sweep;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

RunConfigFile parse_run_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  for (const auto& [name, body] : root) {
    const auto it = allowed_keys().find(name);
    if (body.empty()) throw ConfigError("'" + name + "': keys must live inside a [section]");
    if (it == allowed_keys().end()) throw ConfigError("[" + name + "]: unknown section");
    for (const auto& [key, value] : body) {
      if (it->second.count(key) == 0) throw ConfigError("[" + name + "]." + key + ": unknown key");
    }
  }

  const Section params_s = section(root, "params");
  RunConfigFile cfg{parse_params(params_s, 0.0, false),
                    parse_environment(section(root, "environment"), base_dir), attack::None{},
                    std::nullopt, std::nullopt};
  cfg.attack = parse_attack(section(root, "attack"));

  const Section sweep_s = section(root, "sweep");
  if (sweep_s.present()) {
    cfg.sweep = parse_sweep(sweep_s);
    for (double eps : cfg.sweep->epsilons) {
      try {
        (void)parse_params(params_s, eps, true);
      } catch (const ConfigError& e) {
        throw ConfigError("[sweep].epsilons: value " + format_double(eps) + " rejected: " + e.what());
      }
    }
  }
  const Section limits = section(root, "limits");
  if (limits.has("max_total_samples")) {
    const auto cap = limits.unsigned_int("max_total_samples");
    if (cap == 0) limits.fail("max_total_samples", "must be positive");
    cfg.max_total_samples = static_cast<std::int64_t>(cap);
  }
  return cfg;
}

RunConfigFile load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_run_config(in, path.parent_path());
}

std::string render_run_config(const RunConfigFile& c) {
  std::ostringstream os;
  const auto& p = c.params;
  os << "[params]\n"
     << "epsilon = " << format_double(p.epsilon()) << '\n'
     << "delta = " << format_double(p.delta()) << '\n'
     << "alpha = " << format_double(p.alpha()) << '\n'
     << "t_bar = " << format_double(p.t_bar()) << '\n'
     << "sigma = " << format_double(p.sigma()) << '\n'
     << "adversary_class = " << to_string(p.adversary_class()) << "\n\n";

  const auto& e = c.environment;
  os << "[environment]\n";
  if (e.kind == EnvironmentKind::kEmpirical) {
    os << "kind = empirical\n"
       << "dataset_path = " << e.dataset_path.string() << '\n'
       << "normalize = " << (e.normalize ? "true" : "false") << '\n';
  } else {
    os << "kind = gaussian\n"
       << "K = " << e.k << '\n'
       << "M = " << e.m << '\n'
       << "sigma = " << format_double(e.sigma) << '\n';
    if (e.means.empty()) {
      os << "mean_range = " << format_double(e.mean_low) << ", " << format_double(e.mean_high) << '\n';
    } else {
      os << "means = ";
      for (std::size_t i = 0; i < e.means.size(); ++i) {
        if (i) os << "; ";
        os << join(e.means[i]);
      }
      os << '\n';
    }
  }
  os << '\n';

  os << "[attack]\n";
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, attack::None>) {
          os << "strategy = none\n";
        } else if constexpr (std::is_same_v<T, attack::PointMass>) {
          os << "strategy = point_mass\nvalue_optimal = " << format_double(a.value_optimal)
             << "\nvalue_suboptimal = " << format_double(a.value_suboptimal) << '\n';
        } else if constexpr (std::is_same_v<T, attack::Offset>) {
          os << "strategy = offset\noffset_optimal = " << format_double(a.offset_optimal)
             << "\noffset_suboptimal = " << format_double(a.offset_suboptimal) << '\n';
        } else if constexpr (std::is_same_v<T, attack::UniformOblivious>) {
          os << "strategy = uniform\nlow = " << format_double(a.low)
             << "\nhigh = " << format_double(a.high) << '\n';
        } else {
          os << "strategy = malicious\nthreshold_quantile = " << format_double(a.threshold_quantile)
             << "\nshift = " << format_double(a.shift) << '\n';
        }
      },
      c.attack);

  if (c.sweep) {
    os << "\n[sweep]\n"
       << "epsilons = " << join(c.sweep->epsilons) << '\n'
       << "replications = " << c.sweep->replications << '\n'
       << "base_seed = " << c.sweep->base_seed << '\n'
       << "algorithms = ";
    for (std::size_t i = 0; i < c.sweep->algorithms.size(); ++i) {
      if (i) os << ", ";
      os << to_string(c.sweep->algorithms[i]);
    }
    os << '\n';
  }
  if (c.max_total_samples) {
    os << "\n[limits]\nmax_total_samples = " << *c.max_total_samples << '\n';
  }
  return os.str();
}

InstanceFactory make_instance_factory(const EnvironmentSection& env) {
  if (env.kind == EnvironmentKind::kEmpirical) {
    auto fixed = std::make_shared<Environment>(load_empirical(env.dataset_path, env.normalize));
    return [fixed](std::uint64_t seed) { return fixed->with_seed(seed); };
  }
  if (!env.means.empty()) {
    std::vector<ArmModel> arms;
    for (const auto& row : env.means) arms.emplace_back(GaussianArm{row, env.sigma});
    auto fixed = std::make_shared<Environment>(std::move(arms), attack::None{}, 0.0, 0);
    return [fixed](std::uint64_t seed) { return fixed->with_seed(seed); };
  }
  return [env](std::uint64_t seed) {
    return random_gaussian_instance(env.k, env.m, env.mean_low, env.mean_high, env.sigma, seed);
  };
}

SweepSpec make_sweep_spec(const RunConfigFile& config, unsigned jobs) {
  if (!config.sweep) throw ConfigError("[sweep]: missing required section");
  SweepSpec spec;
  spec.algorithms = config.sweep->algorithms;
  spec.epsilons = config.sweep->epsilons;
  spec.replications = config.sweep->replications;
  spec.base_seed = config.sweep->base_seed;
  spec.make_instance = make_instance_factory(config.environment);
  spec.attack = config.attack;
  spec.delta = config.params.delta();
  spec.alpha = config.params.alpha();
  spec.t_bar = config.params.t_bar();
  spec.sigma = config.params.sigma();
  spec.adversary_class = config.params.adversary_class();
  spec.max_total_samples = config.max_total_samples;
  spec.jobs = jobs;
  return spec;
}

}  // namespace robust_psi
