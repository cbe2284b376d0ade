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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "costbo/gp.hpp"
#include "costbo/kernel.hpp"

namespace costbo {

enum class CostKind { Uniform, Linear, Periodic, Table, LogGp };
/// Plug-in estimator for unknown costs: `Inv` is E[1/c]^{-1}, `Exp` is E[c].
enum class CostEstimator { Inv, Exp };

std::string_view to_string(CostKind kind);
CostKind parse_cost_kind(std::string_view name);
std::string_view to_string(CostEstimator estimator);
CostEstimator parse_cost_estimator(std::string_view name);

/// Modified Bessel function of the first kind, order zero.
double bessel_i0(double x);

double uniform_cost(std::span<const double> x);
/// (1 + 20 mean(x)) / 11.
double linear_cost(std::span<const double> x);
/// exp(alpha/d sum cos(2 pi beta (x_i - x*_i))) / I0(alpha/d)^d.
double periodic_cost(std::span<const double> x, std::span<const double> x_star, double alpha = 2.0,
                     double beta = 2.0);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares runtime = slope * feature + intercept.
LinearFit proxy_cost_fit(std::span<const double> features, std::span<const double> runtimes);

/// Parameter-count proxy for MLP runtimes: 1e-3 * params.
double parameter_proxy_cost(double params);
/// Weights plus biases of a dense network with the given layer widths
/// (input first, output last).
double dense_param_count(std::span<const int> layer_widths);

/// FLOPs proxy alpha * F + beta for a NATS-style dataset name.
struct FlopsProxy {
  double alpha = 1.0;
  double beta = 0.0;
  double operator()(double flops) const { return alpha * flops + beta; }
};
/// Known datasets: "cifar10-valid", "cifar100", "ImageNet16-120".
FlopsProxy flops_proxy(std::string_view dataset);

/// Posterior of log cost at each candidate.
struct LogCostPosterior {
  Eigen::VectorXd mu_ln_c;
  Eigen::VectorXd sigma_ln_c;
};

/// Elementwise exp(mu -/+ sigma^2 / 2) for Inv / Exp.
Eigen::VectorXd unknown_cost_estimate(const LogCostPosterior& post, CostEstimator estimator);

/// GP on log cost fitted to the observed (candidate index, raw cost) pairs,
/// evaluated at every candidate. With fewer than two observations the
/// default kernel is used without fitting.
LogCostPosterior fit_log_cost(const Points& candidates, std::span<const Eigen::Index> observed,
                              std::span<const double> raw_costs, const FitOptions& options,
                              std::uint64_t seed);

/// lambda = U / (B - C).
double lambda_for_budget(double U, double B, double C);

/// Evaluation-cost model with the scaling factor lambda applied once.
///
/// `raw_costs` gives the true (unscaled) cost of every candidate. For known
/// kinds the policy sees lambda * raw; the LogGp kind hides the true costs
/// and the policy sees lambda times a plug-in estimate from a GP fitted to
/// the log of the costs observed so far.
class CostModel {
 public:
  static CostModel uniform(double lambda);
  static CostModel linear(double lambda);
  static CostModel periodic(double lambda, std::vector<double> x_star, double alpha = 2.0,
                            double beta = 2.0);
  static CostModel table(double lambda, Eigen::VectorXd raw);
  static CostModel log_gp(double lambda, Eigen::VectorXd raw, CostEstimator estimator);

  CostKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  CostEstimator estimator() const { return estimator_; }
  bool known() const { return kind_ != CostKind::LogGp; }
  const std::vector<double>& x_star() const { return x_star_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  CostModel with_lambda(double lambda) const;

  double raw_cost(const Points& candidates, Eigen::Index j) const;
  Eigen::VectorXd raw_costs(const Points& candidates) const;

  /// Scaled costs the policy uses at this step. `observed` / `observed_raw`
  /// are only read by the LogGp kind.
  Eigen::VectorXd policy_costs(const Points& candidates, const Eigen::VectorXd& raw,
                               std::span<const Eigen::Index> observed,
                               const FitOptions& fit_options, std::uint64_t seed) const;

 private:
  CostModel(CostKind kind, double lambda);

  CostKind kind_;
  double lambda_;
  std::vector<double> x_star_;
  double alpha_ = 2.0;
  double beta_ = 2.0;
  Eigen::VectorXd table_;
  CostEstimator estimator_ = CostEstimator::Exp;
};

}  // namespace costbo
