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
#include <deque>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "costbo/gp.hpp"

namespace costbo {

/// Stopping rules. Every rule reduces to "stop when statistic <= threshold".
enum class RuleId { PbgiLogEipc, UcbLcb, LogEipcMed, SrGapMed, Prb, Gss, Convergence };

inline constexpr RuleId kAllRules[] = {RuleId::PbgiLogEipc, RuleId::UcbLcb, RuleId::LogEipcMed,
                                       RuleId::SrGapMed,    RuleId::Prb,    RuleId::Gss,
                                       RuleId::Convergence};

std::string_view to_string(RuleId rule);
/// Accepts the names printed by to_string: "pbgi", "ucb-lcb", "logeipc-med",
/// "srgap-med", "prb", "gss", "convergence".
RuleId parse_rule(std::string_view name);

enum class UpdateTiming { Before, After };

struct RuleConfig {
  double theta = 0.01;       // UCB-LCB gap threshold
  double eta = 0.01;         // LogEIPC-med
  double chi = 0.01;         // SRGap-med
  int median_window = 20;    // I, shared by the two median rules
  double epsilon = 0.05;     // PRB regret tolerance
  double delta = 0.05;       // PRB risk
  int gss_window = 5;        // w, shared by GSS and Convergence
  double phi = 0.01;         // GSS
  double ucb_delta = 0.1;    // confidence parameter in beta_t
  int srgap_paths = 512;     // M
  std::size_t prb_max_samples = 10000;

  int debounce = 1;
  /// No rule may stop while t <= stabilization; negative means "initial
  /// design size".
  int stabilization = -1;
  int ma_window = 1;
  UpdateTiming timing = UpdateTiming::After;

  void validate() const;
};

struct StoppingDecision {
  RuleId rule = RuleId::PbgiLogEipc;
  double statistic = 0.0;
  double threshold = 0.0;
  bool stop_raw = false;
  bool stop_effective = false;
};

// -- PBGI / LogEIPC rule -------------------------------------------------------

/// statistic = max LogEIPC over unevaluated candidates, threshold 0. Vacuous
/// stop when everything has been evaluated.
StoppingDecision pbgi_logeipc_stop(const PosteriorState& state, std::span<const double> costs);

/// The three equivalent stop conditions evaluated independently.
struct ThreeFormVerdicts {
  bool pbgi_form = false;     // min PBGI over unevaluated >= incumbent
  bool ei_form = false;       // EI <= cost at every unevaluated candidate
  bool logeipc_form = false;  // max LogEIPC over unevaluated <= 0
  bool agree() const { return pbgi_form == ei_form && ei_form == logeipc_form; }
};

ThreeFormVerdicts three_form_verdicts(const PosteriorState& state, std::span<const double> costs);
bool equivalence_check(const PosteriorState& state, std::span<const double> costs);

// -- baselines -------------------------------------------------------------------

/// min over evaluated UCB - min over all LCB with width sqrt(beta_t) / 5.
StoppingDecision ucb_lcb_stop(const PosteriorState& state, double beta_t, double theta);

/// `history` holds the max-LogEIPC statistic of every step so far, current
/// one last. Never stops while history.size() <= window.
StoppingDecision logeipc_med_stop(std::span<const double> history, double eta, int window);

/// incumbent - mean over `paths` posterior draws of the draw's minimum.
double srgap_regret_proxy(const ConditionedGp& gp, double incumbent, int paths,
                          std::mt19937_64& rng);

/// `gaps` holds max(r_{s-1} - r_s, 0) for every step with a predecessor,
/// current one last.
StoppingDecision srgap_med_stop(std::span<const double> gaps, double chi, int window);

/// max(ceil(64 * 1.5^(t-1)), 1000), optionally capped.
std::size_t prb_sample_count(std::size_t t, std::size_t cap = SIZE_MAX);

/// Fraction of `samples` joint posterior draws in which the best-mean
/// candidate is more than epsilon above the draw's minimum. Streams draws in
/// blocks so memory stays bounded.
double prb_exceed_fraction(const ConditionedGp& gp, double epsilon, std::size_t samples,
                           std::mt19937_64& rng);

/// statistic = exceed fraction, threshold delta.
StoppingDecision prb_stop(const ConditionedGp& gp, std::size_t t, double epsilon, double delta,
                          std::mt19937_64& rng, std::size_t max_samples = SIZE_MAX);

/// Percentile with linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);
double median(std::span<const double> values);

/// `values` are observations in evaluation order. Needs > w observations.
StoppingDecision gss_stop(std::span<const double> values, int w, double phi);
StoppingDecision convergence_stop(std::span<const double> values, int w);

/// argmin over s of regret[s] + lambda * cum_raw_cost[s], earliest on ties.
std::size_t hindsight_stop(std::span<const double> regret, std::span<const double> cum_raw_cost,
                           double lambda);

// -- smoothing -----------------------------------------------------------------

struct SmoothingConfig {
  int ma_window = 1;
  int debounce = 1;
  std::size_t stabilization = 0;
};

/// Streaming moving average, debounce and stabilization on top of raw
/// decisions. With ma_window > 1 the verdict is recomputed from the trailing
/// mean of the statistics.
class SmoothedRule {
 public:
  explicit SmoothedRule(SmoothingConfig config);

  /// Returns the decision with stop_effective filled in; `t` is the number of
  /// evaluations at which the decision was taken.
  StoppingDecision push(StoppingDecision raw, std::size_t t);

 private:
  SmoothingConfig config_;
  std::deque<double> window_;
  int streak_ = 0;
};

std::vector<StoppingDecision> apply_smoothing(std::span<const StoppingDecision> raw,
                                              std::span<const std::size_t> t_values,
                                              SmoothingConfig config);

// -- per-trial evaluator --------------------------------------------------------

/// Inputs a rule may read at one step.
struct StoppingContext {
  const PosteriorState& state;
  std::span<const double> costs;  // scaled policy costs
  const ConditionedGp& gp;
  std::span<const double> observed_values;  // evaluation order
  std::size_t t = 0;
  std::size_t dim = 1;
  std::uint64_t seed = 0;
};

/// Owns one rule's history inside a trial and produces its raw decision.
class RuleEvaluator {
 public:
  RuleEvaluator(RuleId rule, RuleConfig config);

  RuleId rule() const { return rule_; }
  StoppingDecision evaluate(const StoppingContext& ctx);

 private:
  RuleId rule_;
  RuleConfig config_;
  std::vector<double> history_;
  double previous_regret_ = 0.0;
  bool has_previous_ = false;
};

}  // namespace costbo
