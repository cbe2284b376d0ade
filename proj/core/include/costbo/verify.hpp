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
#include <cstdint>
#include <random>
#include <vector>

#include "costbo/harness.hpp"
#include "costbo/pandora.hpp"

namespace costbo {

/// A posterior state plus aligned costs, for property tests of the stop rule.
struct StopCase {
  PosteriorState state;
  std::vector<double> costs;
};

/// Random state: up to `max_candidates` candidates, means ~ N(0, 1), std
/// log-uniform in [1e-3, 2], costs log-uniform in [1e-4, 1], about a fifth of
/// the candidates evaluated. With `boundary` set, one unevaluated candidate
/// gets cost exactly equal to its EI and the rest are priced out.
StopCase random_stop_case(std::mt19937_64& rng, bool boundary = false,
                          Eigen::Index max_candidates = 40);

struct EquivalenceSuite {
  std::size_t states = 0;
  std::size_t agreements = 0;
  std::size_t stops = 0;
  double seconds = 0.0;
};

EquivalenceSuite run_equivalence_suite(std::size_t states = 1000, std::uint64_t seed = 20240601);

/// Two boxes: A is 0.5 for sure at cost 0.1; B is 0 or 1 with equal odds at
/// cost 0.1.
PandoraInstance pinned_two_box();

struct PandoraSuite {
  std::size_t instances = 0;
  double max_abs_diff = 0.0;
  double pinned_gittins = 0.0;
  double pinned_dp = 0.0;
  double pinned_wrong_order = 0.0;
  double seconds = 0.0;
};

PandoraSuite run_pandora_suite(std::size_t instances = 200, std::uint64_t seed = 20240602);

struct BoundSuiteConfig {
  double lambda = 0.1;
  std::size_t seeds = 50;
  std::uint64_t seed_base = 1000;
  Eigen::Index grid_size = kDefault1dGrid;
  double lengthscale = 0.1;
  CostKind cost = CostKind::Uniform;
  AcquisitionKind acquisition = AcquisitionKind::Pbgi;
  std::size_t cap = 500;
  Eigen::Index u_draws = 2000;
  unsigned jobs = 1;
};

struct BoundSuite {
  BoundReport report;
  std::vector<TrialRecord> trials;
  std::size_t keylb_checked = 0;
  std::size_t keylb_violations = 0;
  std::size_t keylb_trials_holding = 0;
  double seconds = 0.0;
};

/// Single initial point, PBGI/LogEIPC stopping without smoothing, trials
/// halted at the stop; the objective of seed s is a prior draw with seed s.
BoundSuite run_bound_suite(const BoundSuiteConfig& config);

}  // namespace costbo
