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

#include <cstddef>
#include <vector>

#include "costbo/problems.hpp"

namespace costbo {

/// Gittins (reservation) index of a discrete box: the g with
/// E[max(g - V, 0)] = cost, found by inverting the piecewise-linear left side.
double gittins_index(const PandoraBox& box);

/// Expected final value plus total opening cost of the Gittins policy:
/// open the unopened box with the smallest index (lowest position on ties)
/// until the smallest remaining index is at least the best value seen. At
/// least one box is always opened. Exact, by enumerating all outcomes.
double pandora_gittins_policy_value(const PandoraInstance& instance);

/// Same stopping rule, but boxes are opened in the fixed `order` instead of
/// by index.
double pandora_order_value(const PandoraInstance& instance, const std::vector<std::size_t>& order);

inline constexpr std::size_t kPandoraMaxDpStates = 10'000'000;

/// Optimal expected value over all adaptive policies that open at least one
/// box, by backward induction over (opened set, best value seen).
double pandora_dp_value(const PandoraInstance& instance);

}  // namespace costbo
