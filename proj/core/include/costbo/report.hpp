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

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "costbo/harness.hpp"

namespace costbo {

/// One JSON object per iteration followed by a trailer object holding stop
/// times. Non-finite numbers are written as null.
void write_trial_jsonl(std::ostream& out, const TrialRecord& trial, bool wall_clock = true);

/// One row per (lambda, acquisition, rule) cell. `header_lines` are written
/// first, each prefixed with "# ".
void write_aggregate_csv(std::ostream& out, std::span<const AggregateReport> reports,
                         const std::vector<std::string>& header_lines = {});

/// lambda, acquisition, t, mean, two_se rows of the fixed-iteration curves.
void write_curves_csv(std::ostream& out, std::span<const AggregateReport> reports);

/// Parsed aggregate CSV; comment lines are returned in `header_lines`.
struct AggregateTable {
  std::vector<std::string> header_lines;
  std::vector<CellStats> cells;
};
AggregateTable read_aggregate_csv(const std::filesystem::path& path);

struct CurveSeries {
  double lambda = 0.0;
  std::string acquisition;
  std::vector<CurvePoint> points;
};
struct CurveTable {
  std::vector<CurveSeries> series;
};
CurveTable read_curves_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal form ("nan", "inf", "-inf" for non-finite).
std::string format_number(double v);

}  // namespace costbo
