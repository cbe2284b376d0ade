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

#include "costbo/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "costbo/acquisition.hpp"
#include "costbo/error.hpp"

namespace costbo {

namespace {

constexpr std::size_t kPathBlock = 256;

StoppingDecision make_decision(RuleId rule, double statistic, double threshold) {
  StoppingDecision d;
  d.rule = rule;
  d.statistic = statistic;
  d.threshold = threshold;
  d.stop_raw = statistic <= threshold;
  d.stop_effective = d.stop_raw;
  return d;
}

StoppingDecision no_stop(RuleId rule, double statistic) {
  StoppingDecision d;
  d.rule = rule;
  d.statistic = statistic;
  d.threshold = std::numeric_limits<double>::quiet_NaN();
  return d;
}

double running_min(std::span<const double> values, std::size_t count) {
  double best = INFINITY;
  for (std::size_t i = 0; i < count; ++i) best = std::min(best, values[i]);
  return best;
}

}  // namespace

std::string_view to_string(RuleId rule) {
  switch (rule) {
    case RuleId::PbgiLogEipc: return "pbgi";
    case RuleId::UcbLcb: return "ucb-lcb";
    case RuleId::LogEipcMed: return "logeipc-med";
    case RuleId::SrGapMed: return "srgap-med";
    case RuleId::Prb: return "prb";
    case RuleId::Gss: return "gss";
    case RuleId::Convergence: return "convergence";
  }
  return "unknown";
}

RuleId parse_rule(std::string_view name) {
  for (RuleId r : kAllRules) {
    if (to_string(r) == name) return r;
  }
  if (name == "logeipc" || name == "pbgi-logeipc") return RuleId::PbgiLogEipc;
  throw InvalidArgument("unknown stopping rule '" + std::string(name) + "'");
}

void RuleConfig::validate() const {
  if (!(theta > 0.0 && eta > 0.0 && chi > 0.0 && epsilon > 0.0 && delta > 0.0 && phi > 0.0 &&
        ucb_delta > 0.0)) {
    throw InvalidArgument("rule config: thresholds must be positive");
  }
  if (!(delta < 1.0)) throw InvalidArgument("rule config: PRB delta must be below 1");
  if (median_window < 1 || gss_window < 1 || srgap_paths < 1 || prb_max_samples < 1) {
    throw InvalidArgument("rule config: windows and sample counts must be >= 1");
  }
  if (ma_window < 1) throw InvalidArgument("rule config: ma_window must be >= 1");
  if (debounce < 1) throw InvalidArgument("rule config: debounce must be >= 1");
}

// -- PBGI / LogEIPC ---------------------------------------------------------------

StoppingDecision pbgi_logeipc_stop(const PosteriorState& state, std::span<const double> costs) {
  const AcquisitionScore score = log_eipc(state, costs);
  const double stat = score.best_index ? score.best_value : -INFINITY;
  return make_decision(RuleId::PbgiLogEipc, stat, 0.0);
}

ThreeFormVerdicts three_form_verdicts(const PosteriorState& state, std::span<const double> costs) {
  ThreeFormVerdicts v;
  const AcquisitionScore g = pbgi(state, costs);
  v.pbgi_form = !g.best_index || g.best_value >= state.incumbent;

  v.ei_form = true;
  for (Eigen::Index j = 0; j < state.size(); ++j) {
    if (state.is_evaluated(j)) continue;
    if (ei(state.mean[j], state.std[j], state.incumbent) > costs[static_cast<std::size_t>(j)]) {
      v.ei_form = false;
      break;
    }
  }
  v.logeipc_form = pbgi_logeipc_stop(state, costs).stop_raw;
  return v;
}

bool equivalence_check(const PosteriorState& state, std::span<const double> costs) {
  return three_form_verdicts(state, costs).agree();
}

// -- UCB-LCB ------------------------------------------------------------------------

StoppingDecision ucb_lcb_stop(const PosteriorState& state, double beta_t, double theta) {
  if (!(beta_t >= 0.0)) throw InvalidArgument("ucb_lcb_stop: beta_t must be nonnegative");
  const double width = std::sqrt(beta_t) / kConfidenceScaleDown;
  double min_ucb = INFINITY;
  double min_lcb = INFINITY;
  for (Eigen::Index j = 0; j < state.size(); ++j) {
    min_lcb = std::min(min_lcb, state.mean[j] - width * state.std[j]);
    if (state.is_evaluated(j)) min_ucb = std::min(min_ucb, state.mean[j] + width * state.std[j]);
  }
  if (!std::isfinite(min_ucb)) {
    throw InvalidArgument("ucb_lcb_stop: needs at least one evaluated candidate");
  }
  return make_decision(RuleId::UcbLcb, min_ucb - min_lcb, theta);
}

// -- median rules ----------------------------------------------------------------------

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("percentile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("percentile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * double(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - double(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::span<const double> values) {
  return percentile(std::vector<double>(values.begin(), values.end()), 0.5);
}

StoppingDecision logeipc_med_stop(std::span<const double> history, double eta, int window) {
  if (history.empty()) throw InvalidArgument("logeipc_med_stop: empty history");
  const double stat = history.back();
  if (history.size() <= static_cast<std::size_t>(window)) return no_stop(RuleId::LogEipcMed, stat);
  const double threshold =
      std::log(eta) + median(history.first(static_cast<std::size_t>(window)));
  return make_decision(RuleId::LogEipcMed, stat, threshold);
}

double srgap_regret_proxy(const ConditionedGp& gp, double incumbent, int paths,
                          std::mt19937_64& rng) {
  if (paths < 1) throw InvalidArgument("srgap: need at least one path");
  double total = 0.0;
  for (int done = 0; done < paths;) {
    const int block = std::min<int>(paths - done, static_cast<int>(kPathBlock));
    const Eigen::MatrixXd draws = gp.sample_paths(block, rng);
    total += draws.colwise().minCoeff().sum();
    done += block;
  }
  return incumbent - total / paths;
}

StoppingDecision srgap_med_stop(std::span<const double> gaps, double chi, int window) {
  if (gaps.empty()) return no_stop(RuleId::SrGapMed, std::numeric_limits<double>::quiet_NaN());
  const double stat = gaps.back();
  if (gaps.size() <= static_cast<std::size_t>(window)) return no_stop(RuleId::SrGapMed, stat);
  const double threshold = chi * median(gaps.first(static_cast<std::size_t>(window)));
  return make_decision(RuleId::SrGapMed, stat, threshold);
}

// -- PRB --------------------------------------------------------------------------------

std::size_t prb_sample_count(std::size_t t, std::size_t cap) {
  if (t < 1) throw InvalidArgument("prb_sample_count: t must be >= 1");
  const double raw = std::ceil(64.0 * std::pow(1.5, double(t) - 1.0));
  const double n = std::max(raw, 1000.0);
  if (n >= double(cap)) return cap;
  return static_cast<std::size_t>(n);
}

double prb_exceed_fraction(const ConditionedGp& gp, double epsilon, std::size_t samples,
                           std::mt19937_64& rng) {
  if (samples < 1) throw InvalidArgument("prb: need at least one sample");
  const Eigen::VectorXd mean = gp.mean();
  Eigen::Index best = 0;
  mean.minCoeff(&best);
  std::size_t exceed = 0;
  for (std::size_t done = 0; done < samples;) {
    const std::size_t block = std::min(samples - done, kPathBlock);
    const Eigen::MatrixXd draws = gp.sample_paths(static_cast<Eigen::Index>(block), rng);
    for (Eigen::Index c = 0; c < draws.cols(); ++c) {
      if (draws(best, c) - draws.col(c).minCoeff() > epsilon) ++exceed;
    }
    done += block;
  }
  return double(exceed) / double(samples);
}

StoppingDecision prb_stop(const ConditionedGp& gp, std::size_t t, double epsilon, double delta,
                          std::mt19937_64& rng, std::size_t max_samples) {
  const std::size_t n = prb_sample_count(t, max_samples);
  return make_decision(RuleId::Prb, prb_exceed_fraction(gp, epsilon, n, rng), delta);
}

// -- observation-only rules ---------------------------------------------------------------

StoppingDecision gss_stop(std::span<const double> values, int w, double phi) {
  const auto window = static_cast<std::size_t>(w);
  if (values.size() <= window) return no_stop(RuleId::Gss, std::numeric_limits<double>::quiet_NaN());
  const double improvement =
      running_min(values, values.size() - window) - running_min(values, values.size());
  const double iqr = percentile({values.begin(), values.end()}, 0.75) -
                     percentile({values.begin(), values.end()}, 0.25);
  return make_decision(RuleId::Gss, improvement, phi * iqr);
}

StoppingDecision convergence_stop(std::span<const double> values, int w) {
  const auto window = static_cast<std::size_t>(w);
  if (values.size() <= window) {
    return no_stop(RuleId::Convergence, std::numeric_limits<double>::quiet_NaN());
  }
  const double improvement =
      running_min(values, values.size() - window) - running_min(values, values.size());
  return make_decision(RuleId::Convergence, improvement, 0.0);
}

std::size_t hindsight_stop(std::span<const double> regret, std::span<const double> cum_raw_cost,
                           double lambda) {
  if (regret.empty() || regret.size() != cum_raw_cost.size()) {
    throw InvalidArgument("hindsight_stop: regret and cost sequences must be nonempty and aligned");
  }
  std::size_t best = 0;
  double best_value = regret[0] + lambda * cum_raw_cost[0];
  for (std::size_t s = 1; s < regret.size(); ++s) {
    const double v = regret[s] + lambda * cum_raw_cost[s];
    if (v < best_value) {
      best_value = v;
      best = s;
    }
  }
  return best;
}

// -- smoothing --------------------------------------------------------------------------

SmoothedRule::SmoothedRule(SmoothingConfig config) : config_(config) {
  if (config_.ma_window < 1 || config_.debounce < 1) {
    throw InvalidArgument("smoothing: ma_window and debounce must be >= 1");
  }
}

StoppingDecision SmoothedRule::push(StoppingDecision d, std::size_t t) {
  bool verdict = d.stop_raw;
  if (config_.ma_window > 1) {
    window_.push_back(d.statistic);
    if (window_.size() > static_cast<std::size_t>(config_.ma_window)) window_.pop_front();
    double sum = 0.0;
    for (double v : window_) sum += v;
    const double smoothed = sum / double(window_.size());
    verdict = smoothed <= d.threshold;
  }
  streak_ = verdict ? streak_ + 1 : 0;
  d.stop_effective = streak_ >= config_.debounce && t > config_.stabilization;
  return d;
}

std::vector<StoppingDecision> apply_smoothing(std::span<const StoppingDecision> raw,
                                              std::span<const std::size_t> t_values,
                                              SmoothingConfig config) {
  if (raw.size() != t_values.size()) {
    throw InvalidArgument("apply_smoothing: decisions and iteration indices differ in length");
  }
  SmoothedRule rule(config);
  std::vector<StoppingDecision> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out.push_back(rule.push(raw[i], t_values[i]));
  return out;
}

// -- RuleEvaluator ----------------------------------------------------------------------

RuleEvaluator::RuleEvaluator(RuleId rule, RuleConfig config) : rule_(rule), config_(config) {
  config_.validate();
}

StoppingDecision RuleEvaluator::evaluate(const StoppingContext& ctx) {
  switch (rule_) {
    case RuleId::PbgiLogEipc:
      return pbgi_logeipc_stop(ctx.state, ctx.costs);
    case RuleId::UcbLcb:
      return ucb_lcb_stop(ctx.state, ucb_beta(std::max<std::size_t>(ctx.t, 1), ctx.dim,
                                              config_.ucb_delta),
                          config_.theta);
    case RuleId::LogEipcMed: {
      history_.push_back(pbgi_logeipc_stop(ctx.state, ctx.costs).statistic);
      StoppingDecision d = logeipc_med_stop(history_, config_.eta, config_.median_window);
      d.rule = rule_;
      return d;
    }
    case RuleId::SrGapMed: {
      std::mt19937_64 rng(ctx.seed);
      const double r = srgap_regret_proxy(ctx.gp, ctx.state.incumbent, config_.srgap_paths, rng);
      double gap = std::numeric_limits<double>::quiet_NaN();
      if (has_previous_) {
        gap = std::max(previous_regret_ - r, 0.0);
        history_.push_back(gap);
      }
      previous_regret_ = r;
      has_previous_ = true;
      if (std::isnan(gap)) return no_stop(rule_, gap);
      return srgap_med_stop(history_, config_.chi, config_.median_window);
    }
    case RuleId::Prb: {
      std::mt19937_64 rng(ctx.seed);
      return prb_stop(ctx.gp, std::max<std::size_t>(ctx.t, 1), config_.epsilon, config_.delta,
                      rng, config_.prb_max_samples);
    }
    case RuleId::Gss:
      return gss_stop(ctx.observed_values, config_.gss_window, config_.phi);
    case RuleId::Convergence:
      return convergence_stop(ctx.observed_values, config_.gss_window);
  }
  throw InvalidArgument("unknown rule");
}

}  // namespace costbo
