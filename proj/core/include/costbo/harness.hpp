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

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "costbo/acquisition.hpp"
#include "costbo/gp.hpp"
#include "costbo/problems.hpp"
#include "costbo/stopping.hpp"

namespace costbo {

struct TrialConfig {
  AcquisitionKind acquisition = AcquisitionKind::Pbgi;
  std::vector<RuleId> rules{RuleId::PbgiLogEipc};
  RuleConfig rule_config;
  /// Total evaluations including the initial design.
  std::size_t cap = 100;
  /// Defaults to min(2(d + 1), number of candidates).
  std::optional<std::size_t> initial_size;
  DesignMode design = DesignMode::Sobol;
  /// Refit hyperparameters by maximum marginal likelihood. When off, the
  /// problem's generating kernel (or the default kernel) is used throughout.
  bool refit = false;
  FitOptions fit_options;
  /// End the trial once every rule has stopped instead of running to cap.
  bool halt_when_stopped = false;
  double lcb_delta = 0.1;
  int bisection_iterations = kPbgiBisectionIterations;
};

struct IterationRecord {
  /// Number of evaluations after this one (1-based).
  std::size_t t = 0;
  Eigen::Index index = -1;
  double value = 0.0;
  bool initial = false;
  double raw_cost = 0.0;     // reported cost, unscaled
  double scaled_cost = 0.0;  // lambda * raw_cost
  double cum_raw_cost = 0.0;
  double cum_scaled_cost = 0.0;
  /// Scaled cost the policy assigned to this point when choosing it, and its
  /// EI at the incumbent of that moment. NaN for initial-design points.
  double policy_cost = 0.0;
  double ei_at_selection = 0.0;
  double acquisition_value = 0.0;
  double lambda_current = 0.0;
  double incumbent = 0.0;
  Eigen::Index incumbent_index = -1;
  double simple_regret = 0.0;
  /// One per configured rule, evaluated on the state after this evaluation.
  /// Empty during the initial design.
  std::vector<StoppingDecision> decisions;
  double wall_seconds = 0.0;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  std::string problem;
  AcquisitionKind acquisition = AcquisitionKind::Pbgi;
  double lambda = 0.0;
  std::size_t cap = 0;
  std::size_t initial_size = 0;
  std::size_t stabilization = 0;
  std::vector<RuleId> rules;
  std::vector<IterationRecord> iterations;
  /// Per rule: first t with an effective stop, or the last recorded t.
  std::vector<std::size_t> stop_time;
  std::vector<bool> stopped;
  /// Per rule: first t with a raw (unsmoothed) stop, if any.
  std::vector<std::optional<std::size_t>> raw_stop_time;
  std::size_t hindsight_time = 0;
  KernelSpec kernel;
  std::string error;

  const IterationRecord& at(std::size_t t) const { return iterations.at(t - 1); }
  std::size_t last_t() const { return iterations.empty() ? 0 : iterations.back().t; }
  std::optional<std::size_t> rule_slot(RuleId rule) const;
};

/// Runs one seeded trial. The same seed yields the same initial design for
/// every acquisition function.
TrialRecord run_trial(const Problem& problem, const TrialConfig& config, std::uint64_t seed);

/// regret at t plus lambda times reported cumulative raw cost at t.
double cost_adjusted_regret(const TrialRecord& trial, std::size_t t, double lambda);
/// Evaluated at the rule's stop time.
double cost_adjusted_regret(const TrialRecord& trial, RuleId rule, double lambda);

/// Hindsight-optimal t in [initial_size, last_t], earliest on ties.
std::size_t hindsight_time(const TrialRecord& trial, double lambda);

struct KeyLbResult {
  bool applicable = false;
  bool holds = true;
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// min over checked iterations of EI - cost.
  double worst_margin = INFINITY;
};

/// EI of every point selected from a state before the PBGI/LogEIPC rule's
/// first raw stop is at least its scaled policy cost (1e-9 slack). Only
/// applicable to PBGI, PBGI-D and LogEIPC trials that track that rule.
KeyLbResult key_lb_check(const TrialRecord& trial, double slack = 1e-9);

struct BoundReport {
  std::size_t trials = 0;
  std::size_t non_stops = 0;
  double mean_cost = 0.0;  // cumulative scaled cost through tau
  double se_cost = 0.0;
  double C = 0.0;          // scaled cost of the initial design, seed mean
  double U = 0.0;
  double se_U = 0.0;
  double combined_se = 0.0;
  double bound = 0.0;      // C + U
  bool holds = false;      // mean_cost <= bound + 3 combined_se
};

/// Compares the seed-mean scaled cost spent through the PBGI/LogEIPC stop
/// with C + U.
BoundReport expected_cost_bound_check(std::span<const TrialRecord> trials, const UEstimate& U);

struct CellStats {
  double lambda = 0.0;
  std::string acquisition;
  std::string rule;  // rule name, "hindsight" or "cap"
  std::size_t trials = 0;
  double mean_car = 0.0;
  double two_se_car = 0.0;
  double mean_stop = 0.0;
  std::size_t non_stops = 0;
  double mean_cum_cost = 0.0;  // scaled
  double mean_regret = 0.0;
};

struct CurvePoint {
  std::size_t t = 0;
  double mean = 0.0;
  double two_se = 0.0;
};

struct AggregateReport {
  double lambda = 0.0;
  std::vector<CellStats> cells;
  /// Fixed-iteration cost-adjusted regret per acquisition function.
  std::vector<std::pair<std::string, std::vector<CurvePoint>>> curves;
};

/// Means and 2 standard errors per (acquisition, rule) cell, plus the
/// hindsight and run-to-cap cells. Trials are folded in seed order.
AggregateReport aggregate(std::vector<TrialRecord> trials, double lambda);

/// Sample mean and standard error (n - 1 denominator).
std::pair<double, double> mean_and_se(std::span<const double> values);

/// SplitMix64 finalizer used to derive per-step seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace costbo
