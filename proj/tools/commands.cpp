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

#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "costbo/error.hpp"
#include "costbo/parallel.hpp"
#include "costbo/report.hpp"
#include "costbo/verify.hpp"
#include "svg.hpp"

namespace costbo::cli {

namespace {

struct Job {
  std::size_t lambda_slot = 0;
  AcquisitionKind acquisition = AcquisitionKind::Pbgi;
  std::uint64_t seed = 0;
};

std::string lambda_tag(double lambda) { return "lambda-" + format_number(lambda); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

/// Budget mode: lambda = U / (B - C), with U from prior draws on the
/// candidate set and C the seed-mean raw cost of the initial design.
double resolve_budget(const RunConfig& config, std::vector<std::string>& header) {
  const SyntheticSpec& spec = config.synthetic;
  const Points grid = spec.dim == 1 ? unit_grid(spec.grid_size)
                                    : sobol_points(spec.dim, spec.grid_size, config.seed_offset);
  const UEstimate U = estimate_U(spec.kernel, grid, config.u_draws, mix_seed(config.seed_offset, 99));
  double C = 0.0;
  for (std::size_t i = 0; i < config.seeds; ++i) {
    const std::uint64_t seed = config.seed_offset + i;
    const Problem p = make_synthetic(spec, seed);
    const std::size_t n = config.trial.initial_size.value_or(
        std::min(default_initial_size(static_cast<std::size_t>(spec.dim)),
                 static_cast<std::size_t>(p.size())));
    for (Eigen::Index j : initial_design(p.candidates(), n, config.trial.design, seed)) {
      C += p.policy_raw_costs()[j];
    }
  }
  C /= double(config.seeds);
  const double lambda = lambda_for_budget(U.value, *config.budget, C);
  header.push_back("budget B = " + format_number(*config.budget));
  header.push_back("U = " + format_number(U.value) + " (se " + format_number(U.std_error) +
                   ", " + std::to_string(config.u_draws) + " prior draws)");
  header.push_back("C = " + format_number(C) + " (raw cost of the initial design, seed mean)");
  header.push_back("lambda = U / (B - C) = " + format_number(lambda));
  return lambda;
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& log) {
  std::vector<std::string> header;
  std::vector<double> lambdas = config.lambdas;
  std::optional<Problem> table;
  try {
    validate(config);
    if (config.seeds < 2) throw ConfigError("run.seeds must be >= 2 to aggregate");
    if (config.kind == ProblemKind::Table) {
      TabularSpec spec = config.tabular;
      spec.lambda = lambdas.front();
      table = load_tabular(config.csv, spec);
      const std::size_t n_init = config.trial.initial_size.value_or(
          std::min(default_initial_size(static_cast<std::size_t>(table->dim())),
                   static_cast<std::size_t>(table->size())));
      if (config.trial.cap < n_init) {
        throw ConfigError("run.cap (" + std::to_string(config.trial.cap) +
                          ") is below the initial design size " + std::to_string(n_init));
      }
    }
    if (config.budget) lambdas = {resolve_budget(config, header)};
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  header.insert(header.begin(), "run " + config.name);
  {
    std::ostringstream seeds;
    seeds << "seeds " << config.seed_offset << ".." << config.seed_offset + config.seeds - 1
          << ", cap " << config.trial.cap;
    header.insert(header.begin() + 1, seeds.str());
  }

  std::vector<Job> jobs;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    for (AcquisitionKind acq : config.acquisitions) {
      for (std::size_t i = 0; i < config.seeds; ++i) {
        jobs.push_back({l, acq, config.seed_offset + i});
      }
    }
  }
  std::vector<TrialRecord> trials(jobs.size());
  try {
    parallel_for(jobs.size(), config.jobs, [&](std::size_t k) {
      const Job& job = jobs[k];
      const double lambda = lambdas[job.lambda_slot];
      TrialConfig tc = config.trial;
      tc.acquisition = job.acquisition;
      if (table) {
        trials[k] = run_trial(table->with_lambda(lambda), tc, job.seed);
      } else {
        SyntheticSpec spec = config.synthetic;
        spec.lambda = lambda;
        trials[k] = run_trial(make_synthetic(spec, job.seed), tc, job.seed);
      }
    });
  } catch (const std::exception& e) {
    log << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }

  std::size_t failed = 0;
  for (const TrialRecord& t : trials) {
    if (t.error.empty()) continue;
    ++failed;
    log << "trial " << to_string(t.acquisition) << " seed " << t.seed
        << " lambda " << format_number(t.lambda) << " failed at t=" << t.last_t() << ": "
        << t.error << '\n';
  }
  if (failed == trials.size()) {
    log << "every trial failed\n";
    return kExitRuntime;
  }

  std::vector<AggregateReport> reports;
  try {
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      std::vector<TrialRecord> group;
      for (std::size_t k = 0; k < jobs.size(); ++k) {
        if (jobs[k].lambda_slot != l) continue;
        if (trials[k].last_t() < trials[k].initial_size) continue;
        group.push_back(trials[k]);
      }
      reports.push_back(aggregate(std::move(group), lambdas[l]));
    }
    if (failed > 0) header.push_back(std::to_string(failed) + " trial(s) ended early with an error");

    const std::filesystem::path dir = config.out / config.name;
    std::filesystem::create_directories(dir);
    std::ostringstream jsonl;
    for (const TrialRecord& t : trials) write_trial_jsonl(jsonl, t, config.wall_clock);
    write_file(dir / "trials.jsonl", jsonl.str());
    std::ostringstream agg;
    write_aggregate_csv(agg, reports, header);
    write_file(dir / "aggregate.csv", agg.str());
    std::ostringstream curves;
    write_curves_csv(curves, reports);
    write_file(dir / "curves.csv", curves.str());
    log << "wrote " << trials.size() << " trials to " << dir.string() << '\n';
  } catch (const std::exception& e) {
    log << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  for (const std::string& h : header) log << "# " << h << '\n';
  for (const AggregateReport& r : reports) {
    for (const CellStats& c : r.cells) {
      log << "lambda " << format_number(r.lambda) << "  " << c.acquisition << " / " << c.rule
          << ": car " << format_number(c.mean_car) << " +/- " << format_number(c.two_se_car)
          << ", stop " << format_number(c.mean_stop) << ", non-stops " << c.non_stops << '\n';
    }
  }
  return kExitOk;
}

int cmd_verify(const std::string& which, unsigned jobs, std::ostream& log) {
  const bool all = which == "all";
  if (!all && which != "equivalence" && which != "pandora" && which != "bound" &&
      which != "keylb") {
    log << "config error: unknown suite '" << which
        << "' (expected equivalence, pandora, bound, keylb or all)\n";
    return kExitConfig;
  }
  bool ok = true;
  auto verdict = [&](bool pass) {
    ok = ok && pass;
    return pass ? "PASS" : "FAIL";
  };
  try {
    if (all || which == "equivalence") {
      const EquivalenceSuite s = run_equivalence_suite();
      log << verdict(s.agreements == s.states) << " equivalence: " << s.agreements << "/"
          << s.states << " states agree (" << s.stops << " stop), " << format_number(s.seconds)
          << " s\n";
    }
    if (all || which == "pandora") {
      const PandoraSuite s = run_pandora_suite();
      const bool pinned = std::abs(s.pinned_gittins - 0.4) <= 1e-12 &&
                          std::abs(s.pinned_dp - 0.4) <= 1e-12 &&
                          std::abs(s.pinned_wrong_order - 0.45) <= 1e-12;
      log << verdict(s.max_abs_diff <= 1e-9 && pinned) << " pandora: max |gittins - dp| = "
          << format_number(s.max_abs_diff) << " over " << s.instances
          << " instances; pinned gittins " << format_number(s.pinned_gittins) << ", dp "
          << format_number(s.pinned_dp) << ", A-first " << format_number(s.pinned_wrong_order)
          << ", " << format_number(s.seconds) << " s\n";
    }
    if (all || which == "bound" || which == "keylb") {
      for (double lambda : {0.1, 0.01}) {
        BoundSuiteConfig cfg;
        cfg.lambda = lambda;
        cfg.jobs = jobs;
        const BoundSuite s = run_bound_suite(cfg);
        const BoundReport& r = s.report;
        if (all || which == "bound") {
          log << verdict(r.holds) << " bound lambda=" << format_number(lambda)
              << ": mean cost " << format_number(r.mean_cost) << " (se "
              << format_number(r.se_cost) << ") vs C + U = " << format_number(r.C) << " + "
              << format_number(r.U) << " = " << format_number(r.bound) << " (se U "
              << format_number(r.se_U) << ", combined se " << format_number(r.combined_se)
              << "), " << r.non_stops << " non-stops, " << format_number(s.seconds) << " s\n";
        }
        if (all || which == "keylb") {
          log << verdict(s.keylb_violations == 0 && s.keylb_trials_holding == s.trials.size())
              << " keylb lambda=" << format_number(lambda) << ": " << s.keylb_violations
              << " violations in " << s.keylb_checked << " iterations over " << s.trials.size()
              << " trials\n";
        }
      }
    }
  } catch (const std::exception& e) {
    log << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return ok ? kExitOk : kExitVerify;
}

int cmd_plot(const std::filesystem::path& results_dir, std::ostream& log) {
  const std::filesystem::path agg_path = results_dir / "aggregate.csv";
  const std::filesystem::path curves_path = results_dir / "curves.csv";
  if (!std::filesystem::is_directory(results_dir) || !std::filesystem::exists(agg_path)) {
    log << "config error: no aggregate.csv in " << results_dir.string() << '\n';
    return kExitConfig;
  }
  try {
    const AggregateTable agg = read_aggregate_csv(agg_path);
    if (agg.cells.empty()) throw ParseError(agg_path.string() + ": no rows");
    CurveTable curves;
    if (std::filesystem::exists(curves_path)) curves = read_curves_csv(curves_path);

    std::map<double, std::vector<CellStats>> by_lambda;
    for (const CellStats& c : agg.cells) by_lambda[c.lambda].push_back(c);
    for (const auto& [lambda, cells] : by_lambda) {
      const std::string tag = lambda_tag(lambda);
      const std::string title = "lambda = " + format_number(lambda);
      write_file(results_dir / ("bars-" + tag + ".svg"), bar_chart_svg(cells, title));
      std::vector<CurveSeries> series;
      for (const CurveSeries& s : curves.series) {
        if (s.lambda == lambda) series.push_back(s);
      }
      std::vector<CellStats> hindsight;
      for (const CellStats& c : cells) {
        if (c.rule == "hindsight") hindsight.push_back(c);
      }
      write_file(results_dir / ("curves-" + tag + ".svg"),
                 curve_chart_svg(series, hindsight, "fixed-iteration curve, " + title));
      log << "wrote bars-" << tag << ".svg and curves-" << tag << ".svg\n";
    }
  } catch (const std::exception& e) {
    log << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace costbo::cli
