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

#include "costbo/pandora.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "costbo/error.hpp"

namespace costbo {

double gittins_index(const PandoraBox& box) {
  std::vector<std::size_t> order(box.support.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return box.support[a] < box.support[b]; });
  // On [v_k, v_{k+1}] the left side is P_k g - S_k with P_k, S_k the
  // probability mass and first moment of the atoms at or below v_k.
  double mass = 0.0;
  double moment = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    mass += box.probs[order[k]];
    moment += box.probs[order[k]] * box.support[order[k]];
    if (!(mass > 0.0)) continue;
    const double root = (box.cost + moment) / mass;
    const bool last = k + 1 == order.size();
    if (last || root <= box.support[order[k + 1]]) return root;
  }
  throw InvalidArgument("gittins_index: box has no probability mass");
}

namespace {

using Chooser = std::function<std::size_t(unsigned mask)>;

double policy_value(const PandoraInstance& inst, const std::vector<double>& index,
                    const Chooser& choose, unsigned mask, double best) {
  const std::size_t n = inst.boxes.size();
  const unsigned full = (1u << n) - 1u;
  if (mask == full) return best;
  if (mask != 0) {
    double lowest = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) lowest = std::min(lowest, index[i]);
    }
    if (lowest >= best) return best;
  }
  const std::size_t i = choose(mask);
  const PandoraBox& box = inst.boxes[i];
  double value = box.cost;
  for (std::size_t k = 0; k < box.support.size(); ++k) {
    if (box.probs[k] == 0.0) continue;
    value += box.probs[k] *
             policy_value(inst, index, choose, mask | (1u << i), std::min(best, box.support[k]));
  }
  return value;
}

std::vector<double> indices(const PandoraInstance& inst) {
  std::vector<double> out;
  for (const PandoraBox& b : inst.boxes) out.push_back(gittins_index(b));
  return out;
}

void check_small(const PandoraInstance& inst) {
  if (inst.boxes.empty()) throw InvalidArgument("pandora: no boxes");
  if (inst.boxes.size() > 24) throw SizeError("pandora: too many boxes to enumerate");
}

}  // namespace

double pandora_gittins_policy_value(const PandoraInstance& instance) {
  check_small(instance);
  const std::vector<double> index = indices(instance);
  const std::size_t n = instance.boxes.size();
  const Chooser choose = [&](unsigned mask) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) continue;
      if (best == n || index[i] < index[best]) best = i;
    }
    return best;
  };
  return policy_value(instance, index, choose, 0u, INFINITY);
}

double pandora_order_value(const PandoraInstance& instance, const std::vector<std::size_t>& order) {
  check_small(instance);
  const std::size_t n = instance.boxes.size();
  std::vector<std::uint8_t> seen(n, 0);
  for (std::size_t i : order) {
    if (i >= n || seen[i]) throw InvalidArgument("pandora_order_value: order must be a permutation");
    seen[i] = 1;
  }
  if (order.size() != n) throw InvalidArgument("pandora_order_value: order must be a permutation");
  const std::vector<double> index = indices(instance);
  const Chooser choose = [&](unsigned mask) {
    for (std::size_t i : order) {
      if (!(mask & (1u << i))) return i;
    }
    return n;
  };
  return policy_value(instance, index, choose, 0u, INFINITY);
}

double pandora_dp_value(const PandoraInstance& instance) {
  if (instance.boxes.empty()) throw InvalidArgument("pandora: no boxes");
  const std::size_t n = instance.boxes.size();
  std::vector<double> values;
  for (const PandoraBox& b : instance.boxes) {
    values.insert(values.end(), b.support.begin(), b.support.end());
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t levels = values.size() + 1;  // last level is "nothing seen"
  const double states = std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(n, 1000))) *
                        double(levels);
  if (n >= 63 || states > double(kPandoraMaxDpStates)) {
    throw SizeError("pandora_dp_value: " + std::to_string(states) + " states exceed the limit of " +
                    std::to_string(kPandoraMaxDpStates));
  }
  const std::size_t masks = std::size_t{1} << n;
  std::vector<double> memo(masks * levels, std::numeric_limits<double>::quiet_NaN());
  auto level_of = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), v) -
                                    values.begin());
  };

  std::function<double(std::size_t, std::size_t)> solve = [&](std::size_t mask,
                                                               std::size_t level) -> double {
    double& slot = memo[mask * levels + level];
    if (!std::isnan(slot)) return slot;
    const double best = level + 1 == levels ? INFINITY : values[level];
    double v = mask != 0 ? best : INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) continue;
      const PandoraBox& box = instance.boxes[i];
      double open = box.cost;
      for (std::size_t k = 0; k < box.support.size(); ++k) {
        if (box.probs[k] == 0.0) continue;
        const std::size_t next = std::min(level, level_of(box.support[k]));
        open += box.probs[k] * solve(mask | (std::size_t{1} << i), next);
      }
      v = std::min(v, open);
    }
    slot = v;
    return v;
  };
  return solve(0, levels - 1);
}

}  // namespace costbo
