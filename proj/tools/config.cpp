// Copyright 2026 The costbo Authors.
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

#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "costbo/error.hpp"

namespace costbo::cli {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"name", "seeds", "seed_offset", "jobs", "out", "wall_clock", "cap"}},
      {"problem",
       {"kind", "dim", "grid_size", "lengthscale", "output_scale", "csv", "initial_size", "design",
        "refit"}},
      {"cost",
       {"kind", "lambda", "budget", "u_draws", "estimator", "hidden", "alpha", "beta",
        "policy_column", "report_column", "unknown"}},
      {"acquisition", {"kinds", "lcb_delta", "bisection_iterations"}},
      {"stopping",
       {"rules", "theta", "eta", "chi", "median_window", "epsilon", "delta", "gss_window", "phi",
        "ucb_delta", "srgap_paths", "prb_max_samples", "debounce", "stabilization", "ma_window",
        "timing", "halt_when_stopped"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) const {
    if (tree_ == nullptr) return std::nullopt;
    const auto v = tree_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    std::string s = trim(*v);
    if (s.empty()) return std::nullopt;
    return s;
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    return raw(key).value_or(fallback);
  }

  template <typename T>
  std::optional<T> number(const std::string& key) const {
    const auto s = raw(key);
    if (!s) return std::nullopt;
    return parse_number<T>(*s, key);
  }

  template <typename T>
  T number(const std::string& key, T fallback) const {
    return number<T>(key).value_or(fallback);
  }

  bool boolean(const std::string& key, bool fallback) const {
    const auto s = raw(key);
    if (!s) return fallback;
    if (*s == "true" || *s == "yes" || *s == "on" || *s == "1") return true;
    if (*s == "false" || *s == "no" || *s == "off" || *s == "0") return false;
    throw ConfigError(where(key) + ": '" + *s + "' is not a boolean");
  }

  template <typename T>
  T parse_number(const std::string& s, const std::string& key) const {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError(where(key) + ": '" + s + "' is not a valid number");
    }
    return v;
  }

  std::string where(const std::string& key) const { return name_ + "." + key; }

 private:
  std::string name_;
  const pt::ptree* tree_;
};

template <typename Fn>
auto named(const Section& s, const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidArgument& e) {
    throw ConfigError(s.where(key) + ": " + e.what());
  }
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty()) throw ConfigError("key '" + section + "' outside of any section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
    }
  }
  auto section = [&](const std::string& name) {
    const auto child = tree.get_child_optional(name);
    return Section(name, child ? &*child : nullptr);
  };

  RunConfig c;
  const Section run = section("run");
  c.name = run.str("name", c.name);
  c.seeds = run.number<std::size_t>("seeds", c.seeds);
  c.seed_offset = run.number<std::uint64_t>("seed_offset", c.seed_offset);
  c.jobs = run.number<unsigned>("jobs", c.jobs);
  c.out = run.str("out", c.out.string());
  c.wall_clock = run.boolean("wall_clock", c.wall_clock);
  c.trial.cap = run.number<std::size_t>("cap", c.trial.cap);

  const Section problem = section("problem");
  const std::string kind = problem.str("kind", "synthetic");
  if (kind == "synthetic") {
    c.kind = ProblemKind::Synthetic;
  } else if (kind == "table") {
    c.kind = ProblemKind::Table;
  } else {
    throw ConfigError("problem.kind: expected 'synthetic' or 'table', got '" + kind + "'");
  }
  SyntheticSpec& syn = c.synthetic;
  syn.dim = problem.number<Eigen::Index>("dim", syn.dim);
  if (syn.dim < 1) throw ConfigError("problem.dim must be >= 1");
  syn.grid_size = problem.number<Eigen::Index>(
      "grid_size", syn.dim == 1 ? kDefault1dGrid : kDefaultCandidateSet);
  const double lengthscale = problem.number<double>("lengthscale", 0.1);
  if (!(lengthscale > 0.0)) throw ConfigError("problem.lengthscale must be positive");
  syn.kernel = KernelSpec::isotropic(lengthscale);
  syn.kernel.output_scale = problem.number<double>("output_scale", syn.kernel.output_scale);
  if (const auto csv = problem.raw("csv")) {
    const std::filesystem::path p(*csv);
    c.csv = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  if (const auto n = problem.number<std::size_t>("initial_size")) c.trial.initial_size = *n;
  if (const auto d = problem.raw("design")) {
    c.trial.design = named(problem, "design", [&] { return parse_design_mode(*d); });
  }
  c.trial.refit = problem.boolean("refit", c.kind == ProblemKind::Table);

  const Section cost = section("cost");
  if (const auto k = cost.raw("kind")) {
    syn.cost = named(cost, "kind", [&] { return parse_cost_kind(*k); });
    if (syn.cost == CostKind::Table) {
      throw ConfigError("cost.kind: 'table' costs come from the csv columns");
    }
  }
  if (const auto l = cost.raw("lambda")) {
    for (const std::string& v : split_list(*l)) {
      const double lambda = cost.parse_number<double>(v, "lambda");
      if (!(lambda >= 0.0)) throw ConfigError("cost.lambda: values must be nonnegative");
      c.lambdas.push_back(lambda);
    }
  }
  c.budget = cost.number<double>("budget");
  if (c.budget && !c.lambdas.empty()) {
    throw ConfigError("cost: give either lambda or budget, not both");
  }
  if (!c.budget && c.lambdas.empty()) {
    c.lambdas.push_back(c.kind == ProblemKind::Table ? TabularSpec{}.lambda : syn.lambda);
  }
  c.u_draws = cost.number<Eigen::Index>("u_draws", c.u_draws);
  if (const auto e = cost.raw("estimator")) {
    syn.estimator = named(cost, "estimator", [&] { return parse_cost_estimator(*e); });
    c.tabular.estimator = syn.estimator;
  }
  if (const auto h = cost.raw("hidden")) {
    syn.hidden_cost = named(cost, "hidden", [&] { return parse_cost_kind(*h); });
  }
  syn.periodic_alpha = cost.number<double>("alpha", syn.periodic_alpha);
  syn.periodic_beta = cost.number<double>("beta", syn.periodic_beta);
  if (const auto p = cost.raw("policy_column")) {
    c.tabular.policy_cost = named(cost, "policy_column", [&] { return parse_cost_column(*p); });
  }
  if (const auto r = cost.raw("report_column")) {
    c.tabular.report_cost = named(cost, "report_column", [&] { return parse_cost_column(*r); });
  }
  c.tabular.unknown_cost = cost.boolean("unknown", c.tabular.unknown_cost);

  const Section acq = section("acquisition");
  if (const auto k = acq.raw("kinds")) {
    c.acquisitions.clear();
    for (const std::string& name : split_list(*k)) {
      c.acquisitions.push_back(named(acq, "kinds", [&] { return parse_acquisition(name); }));
    }
  }
  c.trial.lcb_delta = acq.number<double>("lcb_delta", c.trial.lcb_delta);
  c.trial.bisection_iterations =
      acq.number<int>("bisection_iterations", c.trial.bisection_iterations);

  const Section stop = section("stopping");
  if (const auto r = stop.raw("rules")) {
    c.trial.rules.clear();
    for (const std::string& name : split_list(*r)) {
      c.trial.rules.push_back(named(stop, "rules", [&] { return parse_rule(name); }));
    }
  }
  RuleConfig& rc = c.trial.rule_config;
  rc.theta = stop.number<double>("theta", rc.theta);
  rc.eta = stop.number<double>("eta", rc.eta);
  rc.chi = stop.number<double>("chi", rc.chi);
  rc.median_window = stop.number<int>("median_window", rc.median_window);
  rc.epsilon = stop.number<double>("epsilon", rc.epsilon);
  rc.delta = stop.number<double>("delta", rc.delta);
  rc.gss_window = stop.number<int>("gss_window", rc.gss_window);
  rc.phi = stop.number<double>("phi", rc.phi);
  rc.ucb_delta = stop.number<double>("ucb_delta", rc.ucb_delta);
  rc.srgap_paths = stop.number<int>("srgap_paths", rc.srgap_paths);
  rc.prb_max_samples = stop.number<std::size_t>("prb_max_samples", rc.prb_max_samples);
  rc.debounce = stop.number<int>("debounce", rc.debounce);
  rc.stabilization = stop.number<int>("stabilization", rc.stabilization);
  rc.ma_window = stop.number<int>("ma_window", rc.ma_window);
  const std::string timing = stop.str("timing", "after");
  if (timing == "after") {
    rc.timing = UpdateTiming::After;
  } else if (timing == "before") {
    rc.timing = UpdateTiming::Before;
  } else {
    throw ConfigError("stopping.timing: expected 'after' or 'before', got '" + timing + "'");
  }
  c.trial.halt_when_stopped = stop.boolean("halt_when_stopped", c.trial.halt_when_stopped);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_run_config(text.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_overrides(RunConfig& config, const Overrides& overrides) {
  if (overrides.jobs) config.jobs = *overrides.jobs;
  if (overrides.seed_offset) config.seed_offset = *overrides.seed_offset;
  if (overrides.out) config.out = *overrides.out;
}

void validate(const RunConfig& c) {
  if (c.name.empty() || c.name.find('/') != std::string::npos) {
    throw ConfigError("run.name must be a nonempty plain file name");
  }
  if (c.seeds == 0) throw ConfigError("run.seeds must be >= 1");
  if (c.jobs == 0) throw ConfigError("run.jobs must be >= 1");
  if (c.acquisitions.empty()) throw ConfigError("acquisition.kinds is empty");
  if (c.budget && !(*c.budget > 0.0)) throw ConfigError("cost.budget must be positive");
  if (c.u_draws < 2) throw ConfigError("cost.u_draws must be >= 2");
  try {
    c.trial.rule_config.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("stopping: ") + e.what());
  }
  if (c.kind == ProblemKind::Table) {
    if (c.csv.empty()) throw ConfigError("problem.csv is required when problem.kind = table");
    if (!std::filesystem::exists(c.csv)) {
      throw ConfigError("problem.csv: no such file " + c.csv.string());
    }
    if (c.budget) throw ConfigError("cost.budget is only supported for synthetic problems");
  } else {
    if (c.synthetic.grid_size < 1) throw ConfigError("problem.grid_size must be >= 1");
    const std::size_t n_init = c.trial.initial_size.value_or(
        default_initial_size(static_cast<std::size_t>(c.synthetic.dim)));
    if (c.trial.cap < n_init) {
      throw ConfigError("run.cap (" + std::to_string(c.trial.cap) +
                        ") is below the initial design size " + std::to_string(n_init));
    }
  }
}

}  // namespace costbo::cli
