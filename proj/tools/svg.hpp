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

#include <string>
#include <vector>

#include "costbo/report.hpp"

namespace costbo::cli {

/// Grouped bar chart of mean cost-adjusted regret with 2SE error bars: one
/// group per acquisition function, one bar per rule. `cells` should share a
/// lambda.
std::string bar_chart_svg(const std::vector<CellStats>& cells, const std::string& title);

/// Fixed-iteration cost-adjusted regret curves (mean with a 2SE band), one
/// per acquisition function, with each function's hindsight cell drawn as a
/// marker at (mean stop, mean regret).
std::string curve_chart_svg(const std::vector<CurveSeries>& series,
                            const std::vector<CellStats>& hindsight, const std::string& title);

}  // namespace costbo::cli
