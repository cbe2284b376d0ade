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

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "costbo/error.hpp"
#include "costbo/harness.hpp"
#include "costbo/problems.hpp"
#include "costbo/verify.hpp"

using namespace costbo;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = COSTBO_FIXTURE_DIR;

Problem small_synthetic(CostKind cost, double lambda, Eigen::Index grid = 201) {
  SyntheticSpec spec;
  spec.grid_size = grid;
  spec.kernel = KernelSpec::isotropic(0.2);
  spec.cost = cost;
  spec.lambda = lambda;
  return make_synthetic(spec, 11);
}

TrialConfig quick_config(std::size_t cap) {
  TrialConfig c;
  c.cap = cap;
  c.rules = {RuleId::PbgiLogEipc, RuleId::Convergence};
  c.rule_config.stabilization = 0;
  return c;
}

// A hand-built trial: one initial point, then `regret` / `cost` per step.
TrialRecord fake_trial(const std::vector<double>& regret, const std::vector<double>& raw_cost) {
  TrialRecord t;
  t.initial_size = 1;
  t.acquisition = AcquisitionKind::Pbgi;
  t.rules = {RuleId::PbgiLogEipc};
  double cum = 0.0;
  for (std::size_t i = 0; i < regret.size(); ++i) {
    IterationRecord it;
    it.t = i + 1;
    it.initial = i == 0;
    it.simple_regret = regret[i];
    it.raw_cost = raw_cost[i];
    cum += raw_cost[i];
    it.cum_raw_cost = cum;
    it.cum_scaled_cost = cum;
    t.iterations.push_back(it);
  }
  t.stop_time = {t.last_t()};
  t.stopped = {false};
  t.raw_stop_time = {std::nullopt};
  return t;
}

}  // namespace

TEST_CASE("trial runs to the cap and records every step") {
  const Problem p = small_synthetic(CostKind::Linear, 0.1);
  const TrialConfig c = quick_config(12);
  const TrialRecord t = run_trial(p, c, 5);
  REQUIRE(t.error.empty());
  CHECK(t.last_t() == 12);
  CHECK(t.initial_size == 4);
  std::set<Eigen::Index> seen;
  double cum = 0.0;
  double best = INFINITY;
  for (const IterationRecord& it : t.iterations) {
    CHECK(seen.insert(it.index).second);
    cum += it.raw_cost;
    CHECK(it.cum_raw_cost == doctest::Approx(cum));
    CHECK(it.scaled_cost == doctest::Approx(0.1 * it.raw_cost));
    best = std::min(best, it.value);
    CHECK(it.incumbent == best);
    CHECK(it.simple_regret == doctest::Approx(best - p.true_min()));
    // Rules first run once the initial design is complete.
    CHECK(it.decisions.size() == (it.t < t.initial_size ? 0 : 2));
  }
  const TrialRecord again = run_trial(p, c, 5);
  for (std::size_t i = 0; i < t.iterations.size(); ++i) {
    CHECK(again.iterations[i].index == t.iterations[i].index);
  }
  // The initial design depends only on the seed.
  TrialConfig lcb = c;
  lcb.acquisition = AcquisitionKind::Lcb;
  const TrialRecord other = run_trial(p, lcb, 5);
  for (std::size_t i = 0; i < 4; ++i) CHECK(other.iterations[i].index == t.iterations[i].index);
}

TEST_CASE("edge cases: cap equals the initial design, one candidate") {
  const Problem p = small_synthetic(CostKind::Uniform, 0.1);
  TrialConfig c = quick_config(4);
  const TrialRecord t = run_trial(p, c, 1);
  CHECK(t.last_t() == 4);
  CHECK(t.stop_time[0] == 4);
  CHECK_FALSE(t.stopped[0]);

  const Problem tiny("one", unit_grid(1), Eigen::VectorXd::Constant(1, 0.3),
                     CostModel::uniform(0.1));
  c.cap = 1;
  const TrialRecord single = run_trial(tiny, c, 1);
  CHECK(single.last_t() == 1);
  CHECK(single.at(1).simple_regret == 0.0);
  c.cap = 0;
  CHECK_THROWS_AS(run_trial(p, c, 1), InvalidArgument);
}

TEST_CASE("cost-adjusted regret and hindsight time") {
  const TrialRecord t = fake_trial({1.0, 0.5, 0.2, 0.2, 0.0}, {1.0, 1.0, 1.0, 1.0, 1.0});
  CHECK(cost_adjusted_regret(t, 1, 0.1) == doctest::Approx(1.1));
  CHECK(cost_adjusted_regret(t, 3, 0.1) == doctest::Approx(0.5));
  CHECK(cost_adjusted_regret(t, 3, 0.0) == doctest::Approx(0.2));
  CHECK(hindsight_time(t, 0.1) == 3);
  CHECK(hindsight_time(t, 0.0) == 5);
  CHECK(cost_adjusted_regret(t, RuleId::PbgiLogEipc, 0.1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(cost_adjusted_regret(t, RuleId::Gss, 0.1), InvalidArgument);
}

TEST_CASE("key lower bound check") {
  TrialRecord t = fake_trial({1.0, 0.5, 0.2}, {1.0, 1.0, 1.0});
  for (auto& it : t.iterations) {
    it.ei_at_selection = 0.3;
    it.policy_cost = 0.2;
  }
  KeyLbResult ok = key_lb_check(t);
  CHECK(ok.applicable);
  CHECK(ok.holds);
  CHECK(ok.checked == 2);
  CHECK(ok.worst_margin == doctest::Approx(0.1));

  SUBCASE("negative control: EI below cost before the stop") {
    t.iterations[2].policy_cost = 0.5;
    const KeyLbResult bad = key_lb_check(t);
    CHECK_FALSE(bad.holds);
    CHECK(bad.violations == 1);
  }
  SUBCASE("iterations at or after the raw stop are not checked") {
    t.iterations[2].policy_cost = 0.5;
    t.raw_stop_time = {2};
    const KeyLbResult after = key_lb_check(t);
    CHECK(after.holds);
    CHECK(after.checked == 1);
  }
  SUBCASE("not applicable to LCB") {
    t.acquisition = AcquisitionKind::Lcb;
    CHECK_FALSE(key_lb_check(t).applicable);
  }
}

TEST_CASE("key lower bound holds on real PBGI and LogEIPC trials") {
  const Problem p = small_synthetic(CostKind::Linear, 0.01);
  for (AcquisitionKind a : {AcquisitionKind::Pbgi, AcquisitionKind::LogEipc}) {
    TrialConfig c = quick_config(25);
    c.acquisition = a;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const KeyLbResult r = key_lb_check(run_trial(p, c, seed));
      CHECK(r.applicable);
      CHECK(r.holds);
    }
  }
}

TEST_CASE("aggregate statistics") {
  const TrialRecord t = fake_trial({1.0, 0.5, 0.2}, {1.0, 1.0, 1.0});
  std::vector<TrialRecord> same{t, t, t};
  same[1].seed = 1;
  same[2].seed = 2;
  const AggregateReport r = aggregate(same, 0.1);
  REQUIRE(r.cells.size() == 3);  // rule, hindsight, cap
  for (const CellStats& c : r.cells) {
    CHECK(c.two_se_car == 0.0);
    CHECK(c.trials == 3);
    CHECK(c.lambda == 0.1);
  }
  CHECK(r.cells[0].rule == "pbgi");
  CHECK(r.cells[0].non_stops == 3);
  CHECK(r.cells[1].rule == "hindsight");
  CHECK(r.cells[1].mean_car == doctest::Approx(0.5));
  CHECK(r.cells[2].rule == "cap");
  REQUIRE(r.curves.size() == 1);
  CHECK(r.curves[0].second.size() == 3);
  CHECK(r.curves[0].second[0].mean == doctest::Approx(1.1));
  CHECK_THROWS_AS(aggregate({t}, 0.1), InvalidArgument);

  const auto [m, se] = mean_and_se(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(m == 2.5);
  CHECK(se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
}

TEST_CASE("hindsight is a per-trial lower bound on every rule") {
  const Problem p = small_synthetic(CostKind::Linear, 0.1);
  TrialConfig c = quick_config(20);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const TrialRecord t = run_trial(p, c, seed);
    const double h = cost_adjusted_regret(t, t.hindsight_time, 0.1);
    for (RuleId r : c.rules) CHECK(h <= cost_adjusted_regret(t, r, 0.1) + 1e-12);
    CHECK(h <= cost_adjusted_regret(t, t.last_t(), 0.1) + 1e-12);
  }
}

TEST_CASE("bound check with a nearly flat objective spends only the initial cost") {
  SyntheticSpec spec;
  spec.grid_size = 201;
  spec.kernel = KernelSpec::isotropic(0.1, 1e-6);
  spec.lambda = 0.1;
  TrialConfig c;
  c.cap = 30;
  c.initial_size = 1;
  c.rule_config.stabilization = 0;
  c.halt_when_stopped = true;
  std::vector<TrialRecord> trials;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    trials.push_back(run_trial(make_synthetic(spec, seed), c, seed));
  }
  // output_scale is a variance, so U scales with its square root.
  const UEstimate U = estimate_U(spec.kernel, unit_grid(201), 200, 3);
  const UEstimate unit = estimate_U(KernelSpec::isotropic(0.1), unit_grid(201), 200, 3);
  CHECK(U.value == doctest::Approx(1e-3 * unit.value).epsilon(1e-6));
  const BoundReport b = expected_cost_bound_check(trials, U);
  CHECK(b.holds);
  CHECK(b.C == doctest::Approx(0.1));
  CHECK(b.mean_cost <= 0.1 + 1e-12);
}

TEST_CASE("tabular pipeline on the toy fixture") {
  std::ifstream in(kFixtures / "toy3.expected.json");
  REQUIRE(in);
  const nlohmann::json expected = nlohmann::json::parse(in);

  const Problem p = load_tabular(kFixtures / "toy3.csv", TabularSpec{});
  CHECK(p.reported_min() == doctest::Approx(expected["test_min"].get<double>()));
  TrialConfig c;
  c.cap = 3;
  c.initial_size = 1;
  c.design = DesignMode::RandomIds;
  c.rule_config.stabilization = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const TrialRecord t = run_trial(p, c, seed);
    REQUIRE(t.last_t() == 3);
    std::vector<Eigen::Index> evaluated;
    for (const IterationRecord& it : t.iterations) {
      evaluated.push_back(it.index);
      std::vector<Eigen::Index> key = evaluated;
      std::sort(key.begin(), key.end());
      bool found = false;
      for (const auto& row : expected["subset_regret"]) {
        if (row["evaluated"].get<std::vector<Eigen::Index>>() != key) continue;
        found = true;
        CHECK(it.simple_regret == doctest::Approx(row["regret"].get<double>()).epsilon(1e-12));
      }
      CHECK(found);
    }
    CHECK(t.at(3).cum_raw_cost == doctest::Approx(6.0));
  }
}

TEST_CASE("verification suites on small sizes") {
  const EquivalenceSuite e = run_equivalence_suite(100, 3);
  CHECK(e.agreements == 100);
  const PandoraSuite s = run_pandora_suite(20, 4);
  CHECK(s.max_abs_diff <= 1e-9);
  CHECK(s.pinned_gittins == doctest::Approx(0.4));
  CHECK(s.pinned_dp == doctest::Approx(0.4));
  CHECK(s.pinned_wrong_order == doctest::Approx(0.45));
}
