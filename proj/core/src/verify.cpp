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

#include "costbo/verify.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "costbo/acquisition.hpp"
#include "costbo/parallel.hpp"
#include "costbo/stopping.hpp"

namespace costbo {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

}  // namespace

StopCase random_stop_case(std::mt19937_64& rng, bool boundary, Eigen::Index max_candidates) {
  std::uniform_int_distribution<Eigen::Index> size(1, max_candidates);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution evaluated(0.2);
  const Eigen::Index m = size(rng);

  StopCase c;
  PosteriorState& s = c.state;
  s.mean.resize(m);
  s.std.resize(m);
  s.evaluated.assign(static_cast<std::size_t>(m), 0);
  s.observed = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
  c.costs.resize(static_cast<std::size_t>(m));
  double incumbent = INFINITY;
  for (Eigen::Index j = 0; j < m; ++j) {
    s.mean[j] = normal(rng);
    s.std[j] = log_uniform(rng, 1e-3, 2.0);
    c.costs[static_cast<std::size_t>(j)] = log_uniform(rng, 1e-4, 1.0);
    if (evaluated(rng)) {
      s.evaluated[static_cast<std::size_t>(j)] = 1;
      s.std[j] = 1e-4;
      s.observed[j] = s.mean[j];
      incumbent = std::min(incumbent, s.mean[j]);
    }
  }
  if (!std::isfinite(incumbent)) incumbent = normal(rng) - std::abs(normal(rng));
  s.incumbent = incumbent;
  s.t = static_cast<std::size_t>(std::count(s.evaluated.begin(), s.evaluated.end(), 1));

  if (boundary) {
    std::vector<Eigen::Index> open;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!s.is_evaluated(j)) open.push_back(j);
    }
    if (!open.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
      const Eigen::Index k = open[pick(rng)];
      for (Eigen::Index j : open) {
        const double e = ei(s.mean[j], s.std[j], s.incumbent);
        c.costs[static_cast<std::size_t>(j)] = j == k ? e : 2.0 * e + 1e-3;
      }
      // A zero EI cannot be a valid cost; fall back to a tiny positive one.
      if (!(c.costs[static_cast<std::size_t>(k)] > 0.0)) c.costs[static_cast<std::size_t>(k)] = 1e-300;
    }
  }
  return c;
}

EquivalenceSuite run_equivalence_suite(std::size_t states, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);
  EquivalenceSuite suite;
  for (std::size_t i = 0; i < states; ++i) {
    const StopCase c = random_stop_case(rng, i % 4 == 3);
    const ThreeFormVerdicts v = three_form_verdicts(c.state, c.costs);
    ++suite.states;
    if (v.agree()) ++suite.agreements;
    if (v.logeipc_form) ++suite.stops;
  }
  suite.seconds = seconds_since(start);
  return suite;
}

PandoraInstance pinned_two_box() {
  return make_pandora({PandoraBox{{0.5}, {1.0}, 0.1}, PandoraBox{{0.0, 1.0}, {0.5, 0.5}, 0.1}});
}

PandoraSuite run_pandora_suite(std::size_t instances, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  PandoraSuite suite;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    const PandoraInstance inst = random_pandora(rng, 4, 4);
    const double diff = std::abs(pandora_gittins_policy_value(inst) - pandora_dp_value(inst));
    suite.max_abs_diff = std::max(suite.max_abs_diff, diff);
    ++suite.instances;
  }
  const PandoraInstance pinned = pinned_two_box();
  suite.pinned_gittins = pandora_gittins_policy_value(pinned);
  suite.pinned_dp = pandora_dp_value(pinned);
  suite.pinned_wrong_order = pandora_order_value(pinned, {0, 1});
  suite.seconds = seconds_since(start);
  return suite;
}

BoundSuite run_bound_suite(const BoundSuiteConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  SyntheticSpec spec;
  spec.dim = 1;
  spec.grid_size = config.grid_size;
  spec.kernel = KernelSpec::isotropic(config.lengthscale);
  spec.cost = config.cost;
  spec.lambda = config.lambda;

  TrialConfig trial_config;
  trial_config.acquisition = config.acquisition;
  trial_config.rules = {RuleId::PbgiLogEipc};
  trial_config.rule_config.stabilization = 0;
  trial_config.rule_config.debounce = 1;
  trial_config.rule_config.ma_window = 1;
  trial_config.cap = config.cap;
  trial_config.initial_size = 1;
  trial_config.halt_when_stopped = true;

  BoundSuite suite;
  suite.trials.resize(config.seeds);
  parallel_for(config.seeds, config.jobs, [&](std::size_t i) {
    const std::uint64_t seed = config.seed_base + i;
    const Problem problem = make_synthetic(spec, seed);
    suite.trials[i] = run_trial(problem, trial_config, seed);
  });
  const UEstimate U = estimate_U(spec.kernel, unit_grid(config.grid_size), config.u_draws,
                                 mix_seed(config.seed_base, 77));
  suite.report = expected_cost_bound_check(suite.trials, U);
  for (const TrialRecord& t : suite.trials) {
    const KeyLbResult k = key_lb_check(t);
    suite.keylb_checked += k.checked;
    suite.keylb_violations += k.violations;
    if (k.applicable && k.holds) ++suite.keylb_trials_holding;
  }
  suite.seconds = seconds_since(start);
  return suite;
}

}  // namespace costbo
