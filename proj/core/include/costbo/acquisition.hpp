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

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "costbo/gp.hpp"

namespace costbo {

enum class AcquisitionKind { LogEipc, Pbgi, PbgiD, Lcb, Thompson };

std::string_view to_string(AcquisitionKind kind);
/// Accepts "logeipc", "pbgi", "pbgi-d" / "pbgi_d", "lcb", "ts" / "thompson".
AcquisitionKind parse_acquisition(std::string_view name);

/// Scores over a candidate set. `best_index` is the argmin (PBGI, LCB, TS) or
/// argmax (LogEIPC) over unevaluated candidates, lowest index on ties; empty
/// when every candidate has been evaluated.
struct AcquisitionScore {
  AcquisitionKind kind = AcquisitionKind::Pbgi;
  Eigen::VectorXd values;
  std::optional<Eigen::Index> best_index;
  double best_value = 0.0;
};

/// Expected improvement below threshold y (minimization):
/// E[max(y - f, 0)] for f ~ N(mu, sigma^2).
double ei(double mu, double sigma, double y);

/// log(ei(mu, sigma, y)), finite wherever sigma > 0 even if ei underflows;
/// -inf when the improvement is exactly zero.
double log_ei(double mu, double sigma, double y);

/// log(EI(x; incumbent) / cost(x)) at every candidate.
AcquisitionScore log_eipc(const PosteriorState& state, std::span<const double> costs);

inline constexpr int kPbgiBisectionIterations = 100;

/// Pandora's Box Gittins index: the g solving ei(mu, sigma, g) = cost.
///
/// Bisection on [mu - 10 sigma, mu + 10 sigma], grown geometrically until the
/// root is bracketed. When `pivot` lies inside the bracket it is used as the
/// first split, so `result >= pivot` holds exactly iff ei(mu, sigma, pivot) <=
/// cost. Exits early once |ei(g) - cost| <= 1e-9 max(1, cost).
double pbgi_index(double mu, double sigma, double cost, std::optional<double> pivot = std::nullopt,
                  int max_iterations = kPbgiBisectionIterations, int* iterations_used = nullptr);

/// PBGI scores: Gittins index at unevaluated candidates, observed value at
/// evaluated ones.
AcquisitionScore pbgi(const PosteriorState& state, std::span<const double> costs,
                      int bisection_iterations = kPbgiBisectionIterations);

/// PBGI-D cost-scale schedule: lambda halves whenever the stopping rule fires.
struct PbgiDState {
  double lambda0 = 1.0;
  double lambda_current = 1.0;
  int halvings = 0;

  static PbgiDState start(double lambda0);
};

PbgiDState pbgi_d_step(const PbgiDState& state, bool stop_triggered);

/// GP-UCB confidence schedule beta_t = 2 log(d t^2 pi^2 / (6 delta)).
double ucb_beta(std::size_t t, std::size_t dim, double delta = 0.1);

inline constexpr double kConfidenceScaleDown = 5.0;

/// mean - sqrt(beta_t) / scale_down * std.
AcquisitionScore lcb(const PosteriorState& state, std::size_t t, std::size_t dim,
                     double delta = 0.1, double scale_down = kConfidenceScaleDown);

/// One joint posterior path; picks its minimum over unevaluated candidates.
AcquisitionScore thompson(const ConditionedGp& gp, const std::vector<std::uint8_t>& evaluated,
                          std::uint64_t seed);
AcquisitionScore thompson(const Dataset& data, const KernelSpec& kernel, const Points& candidates,
                          std::uint64_t seed);

/// Index of the smallest / largest value among unevaluated entries, lowest
/// index on ties.
std::optional<Eigen::Index> argmin_unevaluated(const Eigen::VectorXd& values,
                                               const std::vector<std::uint8_t>& evaluated);
std::optional<Eigen::Index> argmax_unevaluated(const Eigen::VectorXd& values,
                                               const std::vector<std::uint8_t>& evaluated);

}  // namespace costbo
