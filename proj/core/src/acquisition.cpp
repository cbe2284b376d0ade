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

#include "costbo/acquisition.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "costbo/error.hpp"
#include "costbo/normal.hpp"

namespace costbo {

namespace {

constexpr int kMaxBracketDoublings = 60;

void check_costs(const PosteriorState& state, std::span<const double> costs) {
  if (static_cast<Eigen::Index>(costs.size()) != state.size()) {
    throw InvalidArgument("acquisition: " + std::to_string(costs.size()) + " costs for " +
                          std::to_string(state.size()) + " candidates");
  }
  for (double c : costs) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw InvalidArgument("acquisition: costs must be positive and finite");
    }
  }
}

AcquisitionScore finish(AcquisitionKind kind, Eigen::VectorXd values,
                        std::optional<Eigen::Index> best) {
  AcquisitionScore s;
  s.kind = kind;
  s.best_index = best;
  s.best_value = best ? values[*best] : std::numeric_limits<double>::quiet_NaN();
  s.values = std::move(values);
  return s;
}

}  // namespace

std::string_view to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::LogEipc: return "logeipc";
    case AcquisitionKind::Pbgi: return "pbgi";
    case AcquisitionKind::PbgiD: return "pbgi-d";
    case AcquisitionKind::Lcb: return "lcb";
    case AcquisitionKind::Thompson: return "ts";
  }
  return "unknown";
}

AcquisitionKind parse_acquisition(std::string_view name) {
  if (name == "logeipc") return AcquisitionKind::LogEipc;
  if (name == "pbgi") return AcquisitionKind::Pbgi;
  if (name == "pbgi-d" || name == "pbgi_d") return AcquisitionKind::PbgiD;
  if (name == "lcb") return AcquisitionKind::Lcb;
  if (name == "ts" || name == "thompson") return AcquisitionKind::Thompson;
  throw InvalidArgument("unknown acquisition function '" + std::string(name) + "'");
}

double ei(double mu, double sigma, double y) {
  if (!(sigma > 0.0)) return std::max(y - mu, 0.0);
  return sigma * normal::h((y - mu) / sigma);
}

double log_ei(double mu, double sigma, double y) {
  const double value = ei(mu, sigma, y);
  if (value > 0.0) return std::log(value);
  if (!(sigma > 0.0)) return -INFINITY;
  return std::log(sigma) + normal::log_h((y - mu) / sigma);
}

std::optional<Eigen::Index> argmin_unevaluated(const Eigen::VectorXd& values,
                                               const std::vector<std::uint8_t>& evaluated) {
  std::optional<Eigen::Index> best;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (evaluated[static_cast<std::size_t>(j)]) continue;
    if (!best || values[j] < values[*best]) best = j;
  }
  return best;
}

std::optional<Eigen::Index> argmax_unevaluated(const Eigen::VectorXd& values,
                                               const std::vector<std::uint8_t>& evaluated) {
  std::optional<Eigen::Index> best;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (evaluated[static_cast<std::size_t>(j)]) continue;
    if (!best || values[j] > values[*best]) best = j;
  }
  return best;
}

AcquisitionScore log_eipc(const PosteriorState& state, std::span<const double> costs) {
  check_costs(state, costs);
  Eigen::VectorXd values(state.size());
  for (Eigen::Index j = 0; j < state.size(); ++j) {
    values[j] = log_ei(state.mean[j], state.std[j], state.incumbent) -
                std::log(costs[static_cast<std::size_t>(j)]);
  }
  auto best = argmax_unevaluated(values, state.evaluated);
  return finish(AcquisitionKind::LogEipc, std::move(values), best);
}

double pbgi_index(double mu, double sigma, double cost, std::optional<double> pivot,
                  int max_iterations, int* iterations_used) {
  if (iterations_used) *iterations_used = 0;
  if (!(cost > 0.0) || !std::isfinite(mu) || !std::isfinite(cost) || !(sigma >= 0.0)) {
    throw InvalidArgument("pbgi: requires finite mean, nonnegative std and positive finite cost");
  }
  // Pins the ordering against the pivot to the exact EI comparison, which the
  // bracket and the closed form only match up to rounding.
  auto align = [&](double g) {
    if (!pivot) return g;
    if (ei(mu, sigma, *pivot) <= cost) return std::max(g, *pivot);
    return std::min(g, std::nextafter(*pivot, -INFINITY));
  };
  if (!(sigma > 0.0)) return align(mu + cost);

  const double tol = 1e-9 * std::max(1.0, cost);
  // Invariant: ei(lo) <= cost < ei(hi).
  double lo = mu - 10.0 * sigma;
  double hi = mu + 10.0 * sigma;
  double step = 20.0 * sigma;
  for (int n = 0; ei(mu, sigma, lo) > cost; ++n) {
    if (n >= kMaxBracketDoublings || !std::isfinite(lo)) {
      throw NumericalError("pbgi: could not bracket the root from below");
    }
    lo -= step;
    step *= 2.0;
  }
  step = 20.0 * sigma;
  for (int n = 0; ei(mu, sigma, hi) <= cost; ++n) {
    if (n >= kMaxBracketDoublings || !std::isfinite(hi)) {
      throw NumericalError("pbgi: could not bracket the root from above");
    }
    hi += step;
    step *= 2.0;
  }
  if (pivot && lo < *pivot && *pivot < hi) {
    if (ei(mu, sigma, *pivot) <= cost) {
      lo = *pivot;
    } else {
      hi = *pivot;
    }
  }
  for (int it = 0; it < max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (iterations_used) *iterations_used = it + 1;
    const double value = ei(mu, sigma, mid);
    if (value <= cost) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(value - cost) <= tol) return align(mid);
  }
  const double mid = 0.5 * (lo + hi);
  return align((mid > lo && mid < hi) ? mid : lo);
}

AcquisitionScore pbgi(const PosteriorState& state, std::span<const double> costs,
                      int bisection_iterations) {
  check_costs(state, costs);
  Eigen::VectorXd values(state.size());
  const std::optional<double> pivot =
      std::isfinite(state.incumbent) ? std::optional<double>(state.incumbent) : std::nullopt;
  for (Eigen::Index j = 0; j < state.size(); ++j) {
    if (state.is_evaluated(j)) {
      values[j] = state.observed[j];
    } else {
      values[j] = pbgi_index(state.mean[j], state.std[j], costs[static_cast<std::size_t>(j)],
                             pivot, bisection_iterations);
    }
  }
  auto best = argmin_unevaluated(values, state.evaluated);
  return finish(AcquisitionKind::Pbgi, std::move(values), best);
}

PbgiDState PbgiDState::start(double lambda0) {
  if (!(lambda0 > 0.0)) throw InvalidArgument("pbgi-d: lambda0 must be positive");
  return {lambda0, lambda0, 0};
}

PbgiDState pbgi_d_step(const PbgiDState& state, bool stop_triggered) {
  if (!(state.lambda_current > 0.0)) throw InvalidArgument("pbgi-d: lambda must be positive");
  if (!stop_triggered) return state;
  PbgiDState next = state;
  next.halvings += 1;
  next.lambda_current = state.lambda0 * std::ldexp(1.0, -next.halvings);
  return next;
}

double ucb_beta(std::size_t t, std::size_t dim, double delta) {
  if (t < 1 || dim < 1 || !(delta > 0.0)) {
    throw InvalidArgument("ucb_beta: requires t >= 1, dim >= 1, delta > 0");
  }
  const double tt = static_cast<double>(t);
  return 2.0 * std::log(static_cast<double>(dim) * tt * tt * std::numbers::pi * std::numbers::pi /
                        (6.0 * delta));
}

AcquisitionScore lcb(const PosteriorState& state, std::size_t t, std::size_t dim, double delta,
                     double scale_down) {
  const double width = std::sqrt(ucb_beta(t, dim, delta)) / scale_down;
  Eigen::VectorXd values = state.mean - width * state.std;
  auto best = argmin_unevaluated(values, state.evaluated);
  return finish(AcquisitionKind::Lcb, std::move(values), best);
}

AcquisitionScore thompson(const ConditionedGp& gp, const std::vector<std::uint8_t>& evaluated,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd path = gp.sample_paths(1, rng).col(0);
  auto best = argmin_unevaluated(path, evaluated);
  return finish(AcquisitionKind::Thompson, std::move(path), best);
}

AcquisitionScore thompson(const Dataset& data, const KernelSpec& kernel, const Points& candidates,
                          std::uint64_t seed) {
  const PosteriorState state = posterior(data, kernel, candidates);
  ConditionedGp gp(kernel, state.candidates, data.standardize);
  gp.reset(data);
  return thompson(gp, state.evaluated, seed);
}

}  // namespace costbo
