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

#include "costbo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "costbo/error.hpp"

namespace costbo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool refit_due(Eigen::Index n) { return n >= 2 && (n <= 100 || n % 5 == 0); }

bool key_lb_acquisition(AcquisitionKind kind) {
  return kind == AcquisitionKind::Pbgi || kind == AcquisitionKind::PbgiD ||
         kind == AcquisitionKind::LogEipc;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::optional<std::size_t> TrialRecord::rule_slot(RuleId rule) const {
  for (std::size_t r = 0; r < rules.size(); ++r) {
    if (rules[r] == rule) return r;
  }
  return std::nullopt;
}

TrialRecord run_trial(const Problem& problem, const TrialConfig& config, std::uint64_t seed) {
  config.rule_config.validate();
  const auto m = static_cast<std::size_t>(problem.size());
  const auto dim = static_cast<std::size_t>(problem.dim());
  const std::size_t n_init =
      config.initial_size.value_or(std::min(default_initial_size(dim), m));
  if (n_init < 1) throw InvalidArgument("run_trial: initial design must contain a point");
  if (config.cap < n_init) {
    throw InvalidArgument("run_trial: cap " + std::to_string(config.cap) +
                          " is below the initial design size " + std::to_string(n_init));
  }
  const std::size_t cap = std::min(config.cap, m);

  TrialRecord trial;
  trial.seed = seed;
  trial.problem = problem.name();
  trial.acquisition = config.acquisition;
  trial.lambda = problem.cost_model().lambda();
  trial.cap = cap;
  trial.initial_size = n_init;
  trial.stabilization = config.rule_config.stabilization < 0
                            ? n_init
                            : static_cast<std::size_t>(config.rule_config.stabilization);
  trial.rules = config.rules;
  const std::size_t nr = config.rules.size();
  trial.stop_time.assign(nr, 0);
  trial.stopped.assign(nr, false);
  trial.raw_stop_time.assign(nr, std::nullopt);

  const double lambda0 = problem.cost_model().lambda();
  PbgiDState lambda_state = PbgiDState::start(lambda0);
  KernelSpec kernel = config.refit ? KernelSpec{} : problem.generating_kernel.value_or(KernelSpec{});
  const bool standardize = problem.tabular();
  ConditionedGp gp(kernel, problem.shared_candidates(), standardize);

  std::vector<RuleEvaluator> evaluators;
  std::vector<SmoothedRule> smoothers;
  const SmoothingConfig smoothing{config.rule_config.ma_window, config.rule_config.debounce,
                                  trial.stabilization};
  for (RuleId r : config.rules) {
    evaluators.emplace_back(r, config.rule_config);
    smoothers.emplace_back(smoothing);
  }
  std::vector<std::optional<StoppingDecision>> previous(nr);

  std::vector<std::uint8_t> evaluated(m, 0);
  Eigen::VectorXd observed = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), kNaN);
  std::vector<double> values;
  std::vector<Eigen::Index> order;
  double incumbent = INFINITY;
  Eigen::Index incumbent_index = -1;
  double cum_raw = 0.0;
  const Eigen::VectorXd& report_raw = problem.report_raw_costs();
  const Eigen::VectorXd& reported = problem.truth_reported();
  const double reported_min = problem.reported_min();

  auto record_evaluation = [&](Eigen::Index j, bool initial, double policy_cost, double ei_sel,
                               double acq_value, double seconds) {
    const double y = problem.observe(j);
    evaluated[static_cast<std::size_t>(j)] = 1;
    observed[j] = y;
    values.push_back(y);
    order.push_back(j);
    if (y < incumbent) {
      incumbent = y;
      incumbent_index = j;
    }
    cum_raw += report_raw[j];
    IterationRecord it;
    it.t = values.size();
    it.index = j;
    it.value = y;
    it.initial = initial;
    it.raw_cost = report_raw[j];
    it.scaled_cost = lambda0 * report_raw[j];
    it.cum_raw_cost = cum_raw;
    it.cum_scaled_cost = lambda0 * cum_raw;
    it.policy_cost = policy_cost;
    it.ei_at_selection = ei_sel;
    it.acquisition_value = acq_value;
    it.lambda_current = lambda_state.lambda_current;
    it.incumbent = incumbent;
    it.incumbent_index = incumbent_index;
    it.simple_regret = reported[incumbent_index] - reported_min;
    it.wall_seconds = seconds;
    trial.iterations.push_back(std::move(it));
    return y;
  };

  using Clock = std::chrono::steady_clock;
  try {
    const std::vector<Eigen::Index> design =
        initial_design(problem.candidates(), n_init, config.design, seed);
    for (Eigen::Index j : design) {
      const auto start = Clock::now();
      const double y = record_evaluation(j, true, kNaN, kNaN, kNaN, 0.0);
      gp.add_candidate(j, y);
      trial.iterations.back().wall_seconds =
          std::chrono::duration<double>(Clock::now() - start).count();
    }

    for (std::size_t t = n_init;; ++t) {
      const auto start = Clock::now();
      const Eigen::Index n = gp.num_data();
      if (config.refit && refit_due(n)) {
        try {
          kernel = fit_hyperparameters(gp.data(), config.fit_options, mix_seed(seed, t),
                                       n > 2 ? std::optional<KernelSpec>(kernel) : std::nullopt);
          gp.reset(gp.data(), kernel);
        } catch (const FitError&) {
          // Keep conditioning on the previous hyperparameters.
        }
      }
      PosteriorState state = make_state(gp, evaluated, observed, incumbent);
      const CostModel step_model = problem.cost_model().with_lambda(lambda_state.lambda_current);
      Eigen::VectorXd costs = step_model.policy_costs(problem.candidates(),
                                                      problem.policy_raw_costs(), order,
                                                      config.fit_options, mix_seed(seed, 7 * t));
      const std::span<const double> cost_span(costs.data(), static_cast<std::size_t>(costs.size()));

      const StoppingContext ctx{state, cost_span, gp, values, t, dim, mix_seed(seed, 1000 + t)};
      IterationRecord& current = trial.iterations.back();
      for (std::size_t r = 0; r < nr; ++r) {
        const StoppingDecision after = evaluators[r].evaluate(ctx);
        StoppingDecision raw = after;
        if (config.rule_config.timing == UpdateTiming::Before) {
          raw = previous[r].value_or(StoppingDecision{config.rules[r], kNaN, kNaN, false, false});
        }
        previous[r] = after;
        const StoppingDecision d = smoothers[r].push(raw, t);
        if (d.stop_raw && !trial.raw_stop_time[r]) trial.raw_stop_time[r] = t;
        if (d.stop_effective && !trial.stopped[r]) {
          trial.stopped[r] = true;
          trial.stop_time[r] = t;
        }
        current.decisions.push_back(d);
      }

      const bool all_stopped =
          nr > 0 && std::all_of(trial.stopped.begin(), trial.stopped.end(), [](bool s) { return s; });
      if (t >= cap || state.unevaluated_count() == 0 || (config.halt_when_stopped && all_stopped)) {
        current.wall_seconds += std::chrono::duration<double>(Clock::now() - start).count();
        break;
      }

      if (config.acquisition == AcquisitionKind::PbgiD) {
        const bool triggered = pbgi_logeipc_stop(state, cost_span).stop_raw;
        const PbgiDState next = pbgi_d_step(lambda_state, triggered);
        if (next.halvings != lambda_state.halvings) {
          costs *= next.lambda_current / lambda_state.lambda_current;
          lambda_state = next;
        }
      }

      AcquisitionScore score;
      switch (config.acquisition) {
        case AcquisitionKind::LogEipc: score = log_eipc(state, cost_span); break;
        case AcquisitionKind::Pbgi:
        case AcquisitionKind::PbgiD:
          score = pbgi(state, cost_span, config.bisection_iterations);
          break;
        case AcquisitionKind::Lcb: score = lcb(state, t, dim, config.lcb_delta); break;
        case AcquisitionKind::Thompson:
          score = thompson(gp, evaluated, mix_seed(seed, 2000 + t));
          break;
      }
      if (!score.best_index) break;
      const Eigen::Index j = *score.best_index;
      const double ei_sel = ei(state.mean[j], state.std[j], state.incumbent);
      const double seconds_so_far = std::chrono::duration<double>(Clock::now() - start).count();
      const auto eval_start = Clock::now();
      const double y = record_evaluation(j, false, costs[j], ei_sel, score.best_value, 0.0);
      gp.add_candidate(j, y);
      trial.iterations.back().wall_seconds =
          seconds_so_far + std::chrono::duration<double>(Clock::now() - eval_start).count();
    }
  } catch (const Error& e) {
    trial.error = e.what();
  }

  trial.kernel = kernel;
  const std::size_t last = trial.last_t();
  for (std::size_t r = 0; r < nr; ++r) {
    if (!trial.stopped[r]) trial.stop_time[r] = last;
  }
  if (last >= n_init) trial.hindsight_time = hindsight_time(trial, trial.lambda);
  return trial;
}

double cost_adjusted_regret(const TrialRecord& trial, std::size_t t, double lambda) {
  const IterationRecord& it = trial.at(t);
  return it.simple_regret + lambda * it.cum_raw_cost;
}

double cost_adjusted_regret(const TrialRecord& trial, RuleId rule, double lambda) {
  const auto slot = trial.rule_slot(rule);
  if (!slot) {
    throw InvalidArgument("cost_adjusted_regret: rule '" + std::string(to_string(rule)) +
                          "' was not tracked in this trial");
  }
  return cost_adjusted_regret(trial, trial.stop_time[*slot], lambda);
}

std::size_t hindsight_time(const TrialRecord& trial, double lambda) {
  const std::size_t first = std::max<std::size_t>(trial.initial_size, 1);
  if (trial.last_t() < first) throw InvalidArgument("hindsight_time: trial has no feasible stop");
  std::vector<double> regret;
  std::vector<double> cum;
  for (std::size_t t = first; t <= trial.last_t(); ++t) {
    regret.push_back(trial.at(t).simple_regret);
    cum.push_back(trial.at(t).cum_raw_cost);
  }
  return first + hindsight_stop(regret, cum, lambda);
}

KeyLbResult key_lb_check(const TrialRecord& trial, double slack) {
  KeyLbResult result;
  const auto slot = trial.rule_slot(RuleId::PbgiLogEipc);
  if (!slot || !key_lb_acquisition(trial.acquisition)) return result;
  result.applicable = true;
  const std::optional<std::size_t> tau = trial.raw_stop_time[*slot];
  for (const IterationRecord& it : trial.iterations) {
    if (it.initial) continue;
    // Chosen from the state after t - 1 evaluations.
    const std::size_t state_t = it.t - 1;
    if (tau && state_t >= *tau) break;
    ++result.checked;
    const double margin = it.ei_at_selection - it.policy_cost;
    result.worst_margin = std::min(result.worst_margin, margin);
    if (!(margin >= -slack)) ++result.violations;
  }
  result.holds = result.violations == 0;
  return result;
}

std::pair<double, double> mean_and_se(std::span<const double> values) {
  if (values.empty()) return {kNaN, kNaN};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= double(values.size());
  if (values.size() < 2) return {mean, kNaN};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / double(values.size() - 1);
  return {mean, std::sqrt(var / double(values.size()))};
}

BoundReport expected_cost_bound_check(std::span<const TrialRecord> trials, const UEstimate& U) {
  if (trials.size() < 2) throw InvalidArgument("expected_cost_bound_check: need at least 2 trials");
  BoundReport report;
  report.trials = trials.size();
  std::vector<double> spent;
  std::vector<double> initial;
  for (const TrialRecord& trial : trials) {
    const auto slot = trial.rule_slot(RuleId::PbgiLogEipc);
    if (!slot) throw InvalidArgument("expected_cost_bound_check: trial lacks the PBGI/LogEIPC rule");
    if (!trial.stopped[*slot]) ++report.non_stops;
    spent.push_back(trial.at(trial.stop_time[*slot]).cum_scaled_cost);
    initial.push_back(trial.at(trial.initial_size).cum_scaled_cost);
  }
  std::tie(report.mean_cost, report.se_cost) = mean_and_se(spent);
  report.C = mean_and_se(initial).first;
  report.U = U.value;
  report.se_U = U.std_error;
  report.combined_se = std::hypot(report.se_cost, report.se_U);
  report.bound = report.C + report.U;
  report.holds = report.mean_cost <= report.bound + 3.0 * report.combined_se;
  return report;
}

AggregateReport aggregate(std::vector<TrialRecord> trials, double lambda) {
  if (trials.size() < 2) throw InvalidArgument("aggregate: need at least 2 trials");
  std::stable_sort(trials.begin(), trials.end(), [](const TrialRecord& a, const TrialRecord& b) {
    if (a.acquisition != b.acquisition) return a.acquisition < b.acquisition;
    return a.seed < b.seed;
  });
  AggregateReport report;
  report.lambda = lambda;

  std::map<AcquisitionKind, std::vector<const TrialRecord*>> groups;
  for (const TrialRecord& t : trials) groups[t.acquisition].push_back(&t);

  for (const auto& [acq, group] : groups) {
    const std::string acq_name(to_string(acq));
    auto make_cell = [&](const std::string& rule, auto stop_of, auto stopped_of) {
      CellStats cell;
      cell.lambda = lambda;
      cell.acquisition = acq_name;
      cell.rule = rule;
      cell.trials = group.size();
      std::vector<double> car;
      std::vector<double> stops;
      std::vector<double> cum;
      std::vector<double> reg;
      for (const TrialRecord* t : group) {
        const std::size_t s = stop_of(*t);
        car.push_back(cost_adjusted_regret(*t, s, lambda));
        stops.push_back(double(s));
        cum.push_back(lambda * t->at(s).cum_raw_cost);
        reg.push_back(t->at(s).simple_regret);
        if (!stopped_of(*t)) ++cell.non_stops;
      }
      const auto [m, se] = mean_and_se(car);
      cell.mean_car = m;
      cell.two_se_car = 2.0 * se;
      cell.mean_stop = mean_and_se(stops).first;
      cell.mean_cum_cost = mean_and_se(cum).first;
      cell.mean_regret = mean_and_se(reg).first;
      report.cells.push_back(cell);
    };

    std::vector<RuleId> rules;
    for (const TrialRecord* t : group) {
      for (RuleId r : t->rules) {
        if (std::find(rules.begin(), rules.end(), r) == rules.end()) rules.push_back(r);
      }
    }
    for (RuleId r : rules) {
      for (const TrialRecord* t : group) {
        if (!t->rule_slot(r)) {
          throw InvalidArgument("aggregate: rule '" + std::string(to_string(r)) +
                                "' missing from some trials");
        }
      }
      make_cell(
          std::string(to_string(r)),
          [r](const TrialRecord& t) { return t.stop_time[*t.rule_slot(r)]; },
          [r](const TrialRecord& t) { return bool(t.stopped[*t.rule_slot(r)]); });
    }
    make_cell(
        "hindsight", [lambda](const TrialRecord& t) { return hindsight_time(t, lambda); },
        [](const TrialRecord&) { return true; });
    make_cell(
        "cap", [](const TrialRecord& t) { return t.last_t(); },
        [](const TrialRecord&) { return true; });

    std::size_t first = 0;
    std::size_t last = SIZE_MAX;
    for (const TrialRecord* t : group) {
      first = std::max(first, std::max<std::size_t>(t->initial_size, 1));
      last = std::min(last, t->last_t());
    }
    std::vector<CurvePoint> curve;
    for (std::size_t s = first; s <= last; ++s) {
      std::vector<double> v;
      for (const TrialRecord* t : group) v.push_back(cost_adjusted_regret(*t, s, lambda));
      const auto [m, se] = mean_and_se(v);
      curve.push_back({s, m, 2.0 * se});
    }
    report.curves.emplace_back(acq_name, std::move(curve));
  }
  return report;
}

}  // namespace costbo
