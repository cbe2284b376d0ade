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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "costbo/error.hpp"
#include "costbo/pandora.hpp"
#include "costbo/problems.hpp"

using namespace costbo;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = COSTBO_FIXTURE_DIR;

fs::path write_temp(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "costbo_test_problems";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return p;
}

std::string parse_message(const fs::path& p) {
  try {
    load_tabular(p, TabularSpec{});
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("initial design size") {
  CHECK(default_initial_size(1) == 4);
  CHECK(default_initial_size(6) == 14);
}

TEST_CASE("Sobol points are seeded and stay in the unit cube") {
  const Points a = sobol_points(3, 64, 7);
  const Points b = sobol_points(3, 64, 7);
  const Points c = sobol_points(3, 64, 8);
  CHECK(a.isApprox(b));
  CHECK_FALSE(a.isApprox(c));
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() < 1.0);
  // Low discrepancy: each coordinate's mean is close to 1/2.
  for (Eigen::Index d = 0; d < 3; ++d) CHECK(std::abs(a.col(d).mean() - 0.5) < 0.02);
  CHECK_THROWS_AS(sobol_points(0, 4, 1), InvalidArgument);
}

TEST_CASE("synthetic problems") {
  SyntheticSpec spec;
  spec.grid_size = 501;
  const Problem p = make_synthetic(spec, 3);
  const Problem q = make_synthetic(spec, 3);
  const Problem r = make_synthetic(spec, 4);
  CHECK(p.size() == 501);
  CHECK(p.dim() == 1);
  CHECK(p.truth_objective() == q.truth_objective());
  CHECK(p.truth_objective() != r.truth_objective());
  CHECK(p.generating_kernel.has_value());
  CHECK_FALSE(p.tabular());
  CHECK(p.reported_min() == p.true_min());

  SUBCASE("periodic cost peaks at the objective's argmin") {
    spec.cost = CostKind::Periodic;
    const Problem per = make_synthetic(spec, 3);
    Eigen::Index argmin = 0;
    per.truth_objective().minCoeff(&argmin);
    // beta = 2 puts a second peak half a period away, so compare values.
    CHECK(per.policy_raw_costs()[argmin] == per.policy_raw_costs().maxCoeff());
    CHECK(per.policy_raw_costs()[argmin] == doctest::Approx(3.2414036409861536).epsilon(1e-12));
  }
  SUBCASE("higher dimensions use a Sobol candidate set") {
    spec.dim = 3;
    spec.grid_size = 256;
    spec.kernel = KernelSpec::isotropic(0.3);
    const Problem p3 = make_synthetic(spec, 1);
    CHECK(p3.dim() == 3);
    CHECK(p3.size() == 256);
  }
  SUBCASE("with_lambda keeps the objective") {
    const Problem w = p.with_lambda(0.5);
    CHECK(w.cost_model().lambda() == 0.5);
    CHECK(w.truth_objective() == p.truth_objective());
  }
}

TEST_CASE("tabular loader on the toy fixture") {
  const Problem p = load_tabular(kFixtures / "toy3.csv", TabularSpec{});
  REQUIRE(p.size() == 3);
  CHECK(p.tabular());
  CHECK(p.ids == std::vector<std::string>{"a", "b", "c"});
  CHECK(p.observe(1) == doctest::Approx(0.10));
  CHECK(p.truth_reported()[2] == doctest::Approx(0.2));
  CHECK(p.reported_min() == doctest::Approx(0.2));
  CHECK(p.policy_raw_costs()[2] == 3.0);
  CHECK(p.candidates()(1, 0) == doctest::Approx(0.5));
  CHECK(p.unscale(std::vector<double>{1.0})[0] == doctest::Approx(1.0));

  TabularSpec runtime;
  runtime.policy_cost = CostColumn::Runtime;
  runtime.report_cost = CostColumn::Runtime;
  CHECK(load_tabular(kFixtures / "toy3.csv", runtime).report_raw_costs()[0] == 10.0);
}

TEST_CASE("tabular loader errors name the file and line") {
  const std::string head = "id,f1,val_error,test_error,runtime,proxy_cost\n";
  SUBCASE("short row") {
    const auto p = write_temp("short.csv", head + "a,0,0.1,0.2,1,1\nb,0,0.1\n");
    CHECK(parse_message(p).find("short.csv:3:") != std::string::npos);
  }
  SUBCASE("duplicate id") {
    const auto p = write_temp("dup.csv", head + "a,0,0.1,0.2,1,1\na,1,0.1,0.2,1,1\n");
    CHECK(parse_message(p).find("duplicate id") != std::string::npos);
  }
  SUBCASE("duplicate column") {
    const auto p = write_temp("dupcol.csv", "id,f1,f1,val_error,test_error,runtime\n");
    CHECK(parse_message(p).find("duplicate column") != std::string::npos);
  }
  SUBCASE("missing column") {
    const auto p = write_temp("missing.csv", "id,f1,val_error,runtime\na,0,0.1,1\n");
    CHECK(parse_message(p).find("missing required column 'test_error'") != std::string::npos);
  }
  SUBCASE("bad number") {
    const auto p = write_temp("nan.csv", head + "a,zero,0.1,0.2,1,1\n");
    CHECK(parse_message(p).find("nan.csv:2:") != std::string::npos);
  }
  SUBCASE("no rows") {
    const auto p = write_temp("empty_rows.csv", head);
    CHECK(parse_message(p).find("no data rows") != std::string::npos);
  }
  CHECK_THROWS_AS(load_tabular("/nonexistent/table.csv", TabularSpec{}), ParseError);
}

TEST_CASE("initial design picks distinct candidates") {
  const Points grid = unit_grid(101);
  for (DesignMode mode : {DesignMode::Sobol, DesignMode::RandomIds}) {
    const auto d = initial_design(grid, 10, mode, 5);
    CHECK(d.size() == 10);
    CHECK(std::set<Eigen::Index>(d.begin(), d.end()).size() == 10);
    CHECK(d == initial_design(grid, 10, mode, 5));
    CHECK(*std::max_element(d.begin(), d.end()) < 101);
  }
  CHECK(initial_design(unit_grid(3), 3, DesignMode::Sobol, 1).size() == 3);
  CHECK(initial_design(grid, 0, DesignMode::Sobol, 1).empty());
  CHECK_THROWS_AS(initial_design(unit_grid(3), 4, DesignMode::Sobol, 1), InvalidArgument);
  CHECK(parse_design_mode("random-ids") == DesignMode::RandomIds);
  CHECK_THROWS_AS(parse_design_mode("lhs"), InvalidArgument);
  CHECK(parse_cost_column("runtime") == CostColumn::Runtime);
}

TEST_CASE("Pandora instance validation") {
  CHECK_THROWS_AS(make_pandora({}), InvalidArgument);
  CHECK_THROWS_AS(make_pandora({{{0.0, 1.0}, {0.5, 0.4}, 0.1}}), InvalidArgument);
  CHECK_THROWS_AS(make_pandora({{{0.0, 1.0}, {0.5}, 0.1}}), InvalidArgument);
  CHECK_THROWS_AS(make_pandora({{{0.0}, {-0.5}, 0.1}}), InvalidArgument);
  std::vector<PandoraBox> many(kPandoraMaxBoxes + 1, PandoraBox{{0.0}, {1.0}, 0.1});
  CHECK_THROWS_AS(make_pandora(many), InvalidArgument);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const PandoraInstance inst = random_pandora(rng);
    CHECK(inst.boxes.size() >= 1);
    CHECK(inst.boxes.size() <= 4);
    for (const PandoraBox& b : inst.boxes) CHECK(b.support.size() <= 4);
  }
}

TEST_CASE("Pandora: single box and order values") {
  // A lone box must be opened: value = cost + E[V] = 0.2 + 0.5.
  const PandoraInstance one = make_pandora({{{0.0, 1.0}, {0.5, 0.5}, 0.2}});
  CHECK(pandora_dp_value(one) == doctest::Approx(0.7));
  CHECK(pandora_gittins_policy_value(one) == doctest::Approx(0.7));

  // Gittins index of a sure box is value + cost.
  CHECK(gittins_index({{0.5}, {1.0}, 0.1}) == doctest::Approx(0.6));
  // Bernoulli box {0, 1}: E[(g - X)^+] = g / 2 = 0.1 gives g = 0.2.
  CHECK(gittins_index({{0.0, 1.0}, {0.5, 0.5}, 0.1}) == doctest::Approx(0.2));

  // Raising a cost never lowers the optimal expected loss.
  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i) {
    PandoraInstance inst = random_pandora(rng);
    const double before = pandora_dp_value(inst);
    inst.boxes[0].cost *= 2.0;
    CHECK(pandora_dp_value(inst) >= before - 1e-12);
  }

  // B first: 0.1 + 0.5 * (0.1 + 0.5). A first: 0.1 + 0.5, then B is worth
  // opening: 0.1 + 0.1 + 0.5 * 0.5.
  const PandoraInstance two = make_pandora({{{0.5}, {1.0}, 0.1}, {{0.0, 1.0}, {0.5, 0.5}, 0.1}});
  CHECK(pandora_order_value(two, {1, 0}) == doctest::Approx(0.4));
  CHECK(pandora_order_value(two, {0, 1}) == doctest::Approx(0.45));
}
