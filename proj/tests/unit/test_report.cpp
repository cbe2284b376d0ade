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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "costbo/error.hpp"
#include "costbo/harness.hpp"
#include "costbo/report.hpp"

using namespace costbo;
namespace fs = std::filesystem;

namespace {

TrialRecord two_step_trial() {
  TrialRecord t;
  t.seed = 7;
  t.problem = "toy";
  t.lambda = 0.5;
  t.cap = 2;
  t.initial_size = 1;
  t.rules = {RuleId::PbgiLogEipc};
  for (std::size_t i = 1; i <= 2; ++i) {
    IterationRecord it;
    it.t = i;
    it.index = static_cast<Eigen::Index>(i);
    it.initial = i == 1;
    it.value = 1.0 / double(i);
    it.raw_cost = 1.0;
    it.cum_raw_cost = double(i);
    it.policy_cost = i == 1 ? std::nan("") : 0.5;
    it.ei_at_selection = i == 1 ? std::nan("") : 0.25;
    it.simple_regret = 0.1;
    StoppingDecision d;
    d.statistic = -INFINITY;
    d.threshold = 0.0;
    d.stop_raw = true;
    it.decisions = {d};
    t.iterations.push_back(it);
  }
  t.stop_time = {2};
  t.stopped = {true};
  t.raw_stop_time = {1};
  t.hindsight_time = 1;
  return t;
}

fs::path temp_file(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "costbo_test_report";
  fs::create_directories(dir);
  std::ofstream(dir / name) << body;
  return dir / name;
}

}  // namespace

TEST_CASE("trial JSONL lines parse and carry nulls for non-finite values") {
  std::ostringstream out;
  write_trial_jsonl(out, two_step_trial(), false);
  std::istringstream in(out.str());
  std::vector<nlohmann::json> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(nlohmann::json::parse(line));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0]["type"] == "iteration");
  CHECK(lines[0]["policy_cost"].is_null());
  CHECK(lines[1]["policy_cost"] == 0.5);
  CHECK(lines[1]["rules"]["pbgi"]["statistic"].is_null());
  CHECK(lines[1]["rules"]["pbgi"]["stop_raw"] == true);
  CHECK_FALSE(lines[1].contains("wall_seconds"));
  CHECK(lines[2]["type"] == "trailer");
  CHECK(lines[2]["stop_times"]["pbgi"] == 2);
  CHECK(lines[2]["raw_stop_times"]["pbgi"] == 1);
  CHECK(lines[2]["error"].is_null());
  CHECK(lines[2]["seed"] == 7);

  std::ostringstream timed;
  write_trial_jsonl(timed, two_step_trial(), true);
  CHECK(timed.str().find("wall_seconds") != std::string::npos);
}

TEST_CASE("aggregate and curve CSVs round-trip") {
  TrialRecord a = two_step_trial();
  TrialRecord b = two_step_trial();
  b.seed = 8;
  b.iterations[1].simple_regret = 0.3;
  const std::vector<AggregateReport> reports{aggregate({a, b}, 0.5)};

  std::ostringstream csv;
  write_aggregate_csv(csv, reports, {"budget 10", "U 0.5"});
  CHECK(csv.str().rfind("# budget 10\n# U 0.5\nlambda,acquisition,rule,", 0) == 0);
  const AggregateTable table = read_aggregate_csv(temp_file("agg.csv", csv.str()));
  CHECK(table.header_lines == std::vector<std::string>{"budget 10", "U 0.5"});
  REQUIRE(table.cells.size() == reports[0].cells.size());
  for (std::size_t i = 0; i < table.cells.size(); ++i) {
    const CellStats& got = table.cells[i];
    const CellStats& want = reports[0].cells[i];
    CHECK(got.lambda == want.lambda);
    CHECK(got.acquisition == want.acquisition);
    CHECK(got.rule == want.rule);
    CHECK(got.trials == want.trials);
    CHECK(got.mean_car == want.mean_car);
    CHECK(got.two_se_car == want.two_se_car);
    CHECK(got.non_stops == want.non_stops);
  }

  std::ostringstream curves;
  write_curves_csv(curves, reports);
  const CurveTable ct = read_curves_csv(temp_file("curves.csv", curves.str()));
  REQUIRE(ct.series.size() == 1);
  CHECK(ct.series[0].lambda == 0.5);
  CHECK(ct.series[0].acquisition == "pbgi");
  REQUIRE(ct.series[0].points.size() == 2);
  CHECK(ct.series[0].points[1].mean == reports[0].curves[0].second[1].mean);
}

TEST_CASE("CSV readers report file and line on bad input") {
  const fs::path bad = temp_file(
      "bad.csv",
      "lambda,acquisition,rule,trials,mean_car,two_se_car,mean_stop,non_stops,mean_cum_cost,"
      "mean_regret\n0.1,pbgi,pbgi,3\n");
  try {
    read_aggregate_csv(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("bad.csv:2") != std::string::npos);
  }
  CHECK_THROWS_AS(read_curves_csv(temp_file("wrong.csv", "x,y\n")), ParseError);
  CHECK_THROWS_AS(read_aggregate_csv("/nonexistent/aggregate.csv"), ParseError);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
}
