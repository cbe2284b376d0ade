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

#include "costbo/report.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "costbo/error.hpp"

namespace costbo {

namespace {

using nlohmann::json;

constexpr const char* kAggregateHeader =
    "lambda,acquisition,rule,trials,mean_car,two_se_car,mean_stop,non_stops,mean_cum_cost,"
    "mean_regret";
constexpr const char* kCurvesHeader = "lambda,acquisition,t,mean,two_se";

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json kernel_json(const KernelSpec& k) {
  return {{"lengthscales", k.lengthscales},
          {"output_scale", number(k.output_scale)},
          {"mean_const", number(k.mean_const)}};
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

double parse(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": '" + s +
                     "' is not a number");
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_trial_jsonl(std::ostream& out, const TrialRecord& trial, bool wall_clock) {
  const std::string acq(to_string(trial.acquisition));
  for (const IterationRecord& it : trial.iterations) {
    json rules = json::object();
    for (std::size_t r = 0; r < it.decisions.size(); ++r) {
      const StoppingDecision& d = it.decisions[r];
      rules[std::string(to_string(trial.rules[r]))] = {{"statistic", number(d.statistic)},
                                                       {"threshold", number(d.threshold)},
                                                       {"stop_raw", d.stop_raw},
                                                       {"stop_effective", d.stop_effective}};
    }
    json line = {{"type", "iteration"},
                 {"problem", trial.problem},
                 {"acquisition", acq},
                 {"seed", trial.seed},
                 {"t", it.t},
                 {"index", it.index},
                 {"value", number(it.value)},
                 {"initial", it.initial},
                 {"raw_cost", number(it.raw_cost)},
                 {"scaled_cost", number(it.scaled_cost)},
                 {"cum_raw_cost", number(it.cum_raw_cost)},
                 {"cum_scaled_cost", number(it.cum_scaled_cost)},
                 {"policy_cost", number(it.policy_cost)},
                 {"ei_at_selection", number(it.ei_at_selection)},
                 {"acquisition_value", number(it.acquisition_value)},
                 {"lambda_current", number(it.lambda_current)},
                 {"incumbent", number(it.incumbent)},
                 {"incumbent_index", it.incumbent_index},
                 {"simple_regret", number(it.simple_regret)},
                 {"rules", rules}};
    if (wall_clock) line["wall_seconds"] = number(it.wall_seconds);
    out << line.dump() << '\n';
  }
  json stops = json::object();
  json stopped = json::object();
  json raw = json::object();
  for (std::size_t r = 0; r < trial.rules.size(); ++r) {
    const std::string name(to_string(trial.rules[r]));
    stops[name] = trial.stop_time[r];
    stopped[name] = bool(trial.stopped[r]);
    raw[name] = trial.raw_stop_time[r] ? json(*trial.raw_stop_time[r]) : json(nullptr);
  }
  json trailer = {{"type", "trailer"},
                  {"problem", trial.problem},
                  {"acquisition", acq},
                  {"seed", trial.seed},
                  {"lambda", number(trial.lambda)},
                  {"cap", trial.cap},
                  {"initial_size", trial.initial_size},
                  {"stabilization", trial.stabilization},
                  {"last_t", trial.last_t()},
                  {"stop_times", stops},
                  {"stopped", stopped},
                  {"raw_stop_times", raw},
                  {"hindsight_time", trial.hindsight_time},
                  {"kernel", kernel_json(trial.kernel)},
                  {"error", trial.error.empty() ? json(nullptr) : json(trial.error)}};
  out << trailer.dump() << '\n';
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateReport> reports,
                         const std::vector<std::string>& header_lines) {
  for (const std::string& h : header_lines) out << "# " << h << '\n';
  out << kAggregateHeader << '\n';
  for (const AggregateReport& report : reports) {
    for (const CellStats& c : report.cells) {
      out << format_number(report.lambda) << ',' << c.acquisition << ',' << c.rule << ','
          << c.trials << ',' << format_number(c.mean_car) << ',' << format_number(c.two_se_car)
          << ',' << format_number(c.mean_stop) << ',' << c.non_stops << ','
          << format_number(c.mean_cum_cost) << ',' << format_number(c.mean_regret) << '\n';
    }
  }
}

void write_curves_csv(std::ostream& out, std::span<const AggregateReport> reports) {
  out << kCurvesHeader << '\n';
  for (const AggregateReport& report : reports) {
    for (const auto& [acq, curve] : report.curves) {
      for (const CurvePoint& p : curve) {
        out << format_number(report.lambda) << ',' << acq << ',' << p.t << ','
            << format_number(p.mean) << ',' << format_number(p.two_se) << '\n';
      }
    }
  }
}

AggregateTable read_aggregate_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  AggregateTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      table.header_lines.push_back(line.size() > 2 ? line.substr(2) : std::string());
      continue;
    }
    if (!header_seen) {
      if (line != kAggregateHeader) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": missing aggregate header");
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string> f = split(line);
    if (f.size() != 10) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 10 fields");
    }
    CellStats c;
    c.lambda = parse(f[0], path, line_no);
    c.acquisition = f[1];
    c.rule = f[2];
    c.trials = static_cast<std::size_t>(parse(f[3], path, line_no));
    c.mean_car = parse(f[4], path, line_no);
    c.two_se_car = parse(f[5], path, line_no);
    c.mean_stop = parse(f[6], path, line_no);
    c.non_stops = static_cast<std::size_t>(parse(f[7], path, line_no));
    c.mean_cum_cost = parse(f[8], path, line_no);
    c.mean_regret = parse(f[9], path, line_no);
    table.cells.push_back(c);
  }
  if (!header_seen) throw ParseError(path.string() + ": no aggregate header");
  return table;
}

CurveTable read_curves_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  CurveTable table;
  std::map<std::pair<double, std::string>, std::size_t> slot;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kCurvesHeader) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad curve header");
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string> f = split(line);
    if (f.size() != 5) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
    }
    const double lambda = parse(f[0], path, line_no);
    auto [it, fresh] = slot.emplace(std::make_pair(lambda, f[1]), table.series.size());
    if (fresh) table.series.push_back({lambda, f[1], {}});
    table.series[it->second].points.push_back(
        {static_cast<std::size_t>(parse(f[2], path, line_no)), parse(f[3], path, line_no),
         parse(f[4], path, line_no)});
  }
  if (!header_seen) throw ParseError(path.string() + ": no curve header");
  return table;
}

}  // namespace costbo
