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

#include "costbo/costs.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "costbo/error.hpp"

namespace costbo {

std::string_view to_string(CostKind kind) {
  switch (kind) {
    case CostKind::Uniform: return "uniform";
    case CostKind::Linear: return "linear";
    case CostKind::Periodic: return "periodic";
    case CostKind::Table: return "table";
    case CostKind::LogGp: return "log-gp";
  }
  return "unknown";
}

CostKind parse_cost_kind(std::string_view name) {
  if (name == "uniform") return CostKind::Uniform;
  if (name == "linear") return CostKind::Linear;
  if (name == "periodic") return CostKind::Periodic;
  if (name == "table") return CostKind::Table;
  if (name == "log-gp" || name == "log_gp") return CostKind::LogGp;
  throw InvalidArgument("unknown cost kind '" + std::string(name) + "'");
}

std::string_view to_string(CostEstimator estimator) {
  return estimator == CostEstimator::Inv ? "inv" : "exp";
}

CostEstimator parse_cost_estimator(std::string_view name) {
  if (name == "inv") return CostEstimator::Inv;
  if (name == "exp") return CostEstimator::Exp;
  throw InvalidArgument("unknown cost estimator '" + std::string(name) + "'");
}

double bessel_i0(double x) {
  x = std::abs(x);
  if (x <= 15.0) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
      term *= q / (double(k) * double(k));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum;
  }
  // Hankel expansion; terms shrink until k ~ 2x, far past double precision.
  const double inv8x = 1.0 / (8.0 * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd * inv8x / k;
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::exp(x) / std::sqrt(2.0 * std::numbers::pi * x) * sum;
}

double uniform_cost(std::span<const double>) { return 1.0; }

double linear_cost(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("linear_cost: empty point");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= double(x.size());
  return (1.0 + 20.0 * mean) / 11.0;
}

double periodic_cost(std::span<const double> x, std::span<const double> x_star, double alpha,
                     double beta) {
  if (x.empty() || x.size() != x_star.size()) {
    throw InvalidArgument("periodic_cost: x and x_star must have the same nonzero dimension");
  }
  const double d = double(x.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += std::cos(2.0 * std::numbers::pi * beta * (x[i] - x_star[i]));
  }
  return std::exp(alpha / d * s) / std::pow(bessel_i0(alpha / d), d);
}

LinearFit proxy_cost_fit(std::span<const double> features, std::span<const double> runtimes) {
  if (features.size() != runtimes.size()) {
    throw InvalidArgument("proxy_cost_fit: features and runtimes differ in length");
  }
  if (features.size() < 2) throw InvalidArgument("proxy_cost_fit: need at least 2 pairs");
  const auto n = static_cast<Eigen::Index>(features.size());
  const Eigen::Map<const Eigen::VectorXd> f(features.data(), n);
  const Eigen::Map<const Eigen::VectorXd> r(runtimes.data(), n);
  const double fm = f.mean();
  const double rm = r.mean();
  const double sff = (f.array() - fm).square().sum();
  if (!(sff > 0.0)) throw InvalidArgument("proxy_cost_fit: feature has zero variance");
  const double sfr = ((f.array() - fm) * (r.array() - rm)).sum();
  LinearFit fit;
  fit.slope = sfr / sff;
  fit.intercept = rm - fit.slope * fm;
  const double ss_tot = (r.array() - rm).square().sum();
  const double ss_res = (r.array() - fit.intercept - fit.slope * f.array()).square().sum();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double parameter_proxy_cost(double params) { return 1e-3 * params; }

double dense_param_count(std::span<const int> layer_widths) {
  if (layer_widths.size() < 2) throw InvalidArgument("dense_param_count: need input and output");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < layer_widths.size(); ++i) {
    if (layer_widths[i] <= 0 || layer_widths[i + 1] <= 0) {
      throw InvalidArgument("dense_param_count: widths must be positive");
    }
    total += double(layer_widths[i]) * layer_widths[i + 1] + layer_widths[i + 1];
  }
  return total;
}

FlopsProxy flops_proxy(std::string_view dataset) {
  if (dataset == "cifar10-valid") return {1.0, 400.0};
  if (dataset == "cifar100") return {2.0, 550.0};
  if (dataset == "ImageNet16-120") return {1.0, 1000.0};
  throw InvalidArgument("flops_proxy: unknown dataset '" + std::string(dataset) + "'");
}

Eigen::VectorXd unknown_cost_estimate(const LogCostPosterior& post, CostEstimator estimator) {
  if (post.mu_ln_c.size() != post.sigma_ln_c.size()) {
    throw InvalidArgument("unknown_cost_estimate: mean and std differ in length");
  }
  const double sign = estimator == CostEstimator::Inv ? -1.0 : 1.0;
  return (post.mu_ln_c.array() + sign * 0.5 * post.sigma_ln_c.array().square()).exp().matrix();
}

LogCostPosterior fit_log_cost(const Points& candidates, std::span<const Eigen::Index> observed,
                              std::span<const double> raw_costs, const FitOptions& options,
                              std::uint64_t seed) {
  if (observed.size() != raw_costs.size()) {
    throw InvalidArgument("fit_log_cost: indices and costs differ in length");
  }
  Dataset data = Dataset::empty(candidates.cols(), true);
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(raw_costs[i] > 0.0)) throw InvalidArgument("fit_log_cost: costs must be positive");
    data.append(row(candidates, observed[i]), std::log(raw_costs[i]));
  }
  KernelSpec kernel;
  if (data.size() >= 2) kernel = fit_hyperparameters(data, options, seed);
  const PosteriorState state = posterior(data, kernel, candidates);
  return {state.mean, state.std};
}

double lambda_for_budget(double U, double B, double C) {
  if (!(U > 0.0)) throw InvalidArgument("lambda_for_budget: U must be positive");
  if (!(B > C)) {
    throw InvalidArgument("lambda_for_budget: budget " + std::to_string(B) +
                          " does not exceed the initial-design cost " + std::to_string(C));
  }
  return U / (B - C);
}

// -- CostModel ----------------------------------------------------------------

CostModel::CostModel(CostKind kind, double lambda) : kind_(kind), lambda_(lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("cost model: lambda must be positive and finite");
  }
}

CostModel CostModel::uniform(double lambda) { return {CostKind::Uniform, lambda}; }

CostModel CostModel::linear(double lambda) { return {CostKind::Linear, lambda}; }

CostModel CostModel::periodic(double lambda, std::vector<double> x_star, double alpha,
                              double beta) {
  if (x_star.empty()) throw InvalidArgument("periodic cost: x_star is empty");
  CostModel m(CostKind::Periodic, lambda);
  m.x_star_ = std::move(x_star);
  m.alpha_ = alpha;
  m.beta_ = beta;
  return m;
}

CostModel CostModel::table(double lambda, Eigen::VectorXd raw) {
  if (raw.size() == 0 || !(raw.array() > 0.0).all() || !raw.allFinite()) {
    throw InvalidArgument("table cost: every cost must be positive and finite");
  }
  CostModel m(CostKind::Table, lambda);
  m.table_ = std::move(raw);
  return m;
}

CostModel CostModel::log_gp(double lambda, Eigen::VectorXd raw, CostEstimator estimator) {
  CostModel m = table(lambda, std::move(raw));
  m.kind_ = CostKind::LogGp;
  m.estimator_ = estimator;
  return m;
}

CostModel CostModel::with_lambda(double lambda) const {
  CostModel m = *this;
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("cost model: lambda must be positive and finite");
  }
  m.lambda_ = lambda;
  return m;
}

double CostModel::raw_cost(const Points& candidates, Eigen::Index j) const {
  switch (kind_) {
    case CostKind::Uniform: return 1.0;
    case CostKind::Linear: return linear_cost(row(candidates, j));
    case CostKind::Periodic: return periodic_cost(row(candidates, j), x_star_, alpha_, beta_);
    case CostKind::Table:
    case CostKind::LogGp:
      if (j < 0 || j >= table_.size()) throw InvalidArgument("table cost: index out of range");
      return table_[j];
  }
  return 1.0;
}

Eigen::VectorXd CostModel::raw_costs(const Points& candidates) const {
  if ((kind_ == CostKind::Table || kind_ == CostKind::LogGp) && table_.size() != candidates.rows()) {
    throw InvalidArgument("table cost: " + std::to_string(table_.size()) + " costs for " +
                          std::to_string(candidates.rows()) + " candidates");
  }
  if (kind_ == CostKind::Periodic && x_star_.size() != static_cast<std::size_t>(candidates.cols())) {
    throw InvalidArgument("periodic cost: x_star dimension does not match candidates");
  }
  Eigen::VectorXd out(candidates.rows());
  for (Eigen::Index j = 0; j < candidates.rows(); ++j) out[j] = raw_cost(candidates, j);
  return out;
}

Eigen::VectorXd CostModel::policy_costs(const Points& candidates, const Eigen::VectorXd& raw,
                                        std::span<const Eigen::Index> observed,
                                        const FitOptions& fit_options, std::uint64_t seed) const {
  if (known()) return lambda_ * raw;
  std::vector<double> seen;
  seen.reserve(observed.size());
  for (Eigen::Index j : observed) seen.push_back(raw[j]);
  const LogCostPosterior post = fit_log_cost(candidates, observed, seen, fit_options, seed);
  return lambda_ * unknown_cost_estimate(post, estimator_);
}

}  // namespace costbo
