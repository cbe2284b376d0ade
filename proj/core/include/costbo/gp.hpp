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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "costbo/kernel.hpp"
#include "costbo/prior_sampler.hpp"

namespace costbo {

/// Observation noise variance added to the kernel diagonal. Doubles as the
/// first jitter level; failures escalate by 10x up to kMaxJitter.
inline constexpr double kNoiseVariance = 1e-6;
inline constexpr double kMaxJitter = 1e-4;

struct Dataset {
  Points points;
  Eigen::VectorXd values;
  /// Fit and condition on z-scored values; posteriors are reported in the
  /// original units.
  bool standardize = false;

  Dataset() = default;
  Dataset(Points p, Eigen::VectorXd v, bool standardize_values = false);
  static Dataset empty(Eigen::Index dim, bool standardize_values = false);

  Eigen::Index size() const { return values.size(); }
  Eigen::Index dim() const { return points.cols(); }
  void append(std::span<const double> x, double y);
  void validate() const;
};

/// Affine map between original and standardized outcome units.
struct OutcomeTransform {
  double shift = 0.0;
  double scale = 1.0;

  static OutcomeTransform identity() { return {}; }
  static OutcomeTransform fit(const Eigen::VectorXd& values);
};

/// GP posterior marginals over a candidate set.
struct PosteriorState {
  std::shared_ptr<const Points> candidates;
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  /// Best (minimum) observed value; +inf before any observation.
  double incumbent = INFINITY;
  /// Number of observations conditioned on.
  std::size_t t = 0;
  /// Candidate j has been evaluated iff evaluated[j] != 0, in which case
  /// observed[j] holds its value.
  std::vector<std::uint8_t> evaluated;
  Eigen::VectorXd observed;

  Eigen::Index size() const { return mean.size(); }
  bool is_evaluated(Eigen::Index j) const { return evaluated[static_cast<std::size_t>(j)] != 0; }
  std::size_t unevaluated_count() const;
};

/// Exact GP conditioning on a fixed candidate set with O(n m) incremental
/// updates when a new observation arrives.
///
/// Observations may be candidates (by index) or arbitrary points. Posterior
/// mean and standard deviation at every candidate are kept current. With a
/// standardized dataset every append triggers a full rebuild because the
/// outcome transform changes.
class ConditionedGp {
 public:
  ConditionedGp(KernelSpec kernel, std::shared_ptr<const Points> candidates,
                bool standardize = false);

  /// Rebuild from scratch on `data`, optionally under a new kernel.
  void reset(const Dataset& data);
  void reset(const Dataset& data, const KernelSpec& kernel);

  /// Condition on y = f(candidates[index]).
  void add_candidate(Eigen::Index index, double y);
  /// Condition on y = f(x) for an arbitrary point.
  void add_point(std::span<const double> x, double y);

  const KernelSpec& kernel() const { return kernel_; }
  const Points& candidates() const { return *candidates_; }
  std::shared_ptr<const Points> shared_candidates() const { return candidates_; }
  const Dataset& data() const { return data_; }
  Eigen::Index num_data() const { return data_.size(); }
  double jitter() const { return jitter_; }
  const OutcomeTransform& transform() const { return transform_; }

  /// Posterior mean / standard deviation at every candidate, original units.
  Eigen::VectorXd mean() const;
  Eigen::VectorXd std() const;

  /// Joint posterior draws at the candidates (Matheron's rule on top of exact
  /// prior draws), one path per column, original units. Requires every
  /// observation to be a candidate.
  Eigen::MatrixXd sample_paths(Eigen::Index count, std::mt19937_64& rng) const;

  /// Builds the shared prior sampler eagerly; otherwise created on first use.
  const PriorSampler& prior_sampler() const;

 private:
  void rebuild();
  bool try_factor(double jitter);
  void append_internal(std::span<const double> x, Eigen::Index candidate_index, double y);
  void ensure_capacity(Eigen::Index n);

  KernelSpec kernel_;
  std::shared_ptr<const Points> candidates_;
  bool standardize_;
  Dataset data_;
  std::vector<Eigen::Index> data_candidate_index_;
  OutcomeTransform transform_;
  double jitter_ = kNoiseVariance;

  // Lower Cholesky factor of K(X, X) + jitter I, capacity-managed.
  Eigen::MatrixXd chol_;
  // Cross factor K(C, X) L^{-T}; column i belongs to observation i.
  Eigen::MatrixXd cross_;
  // L^{-1} (y - mean_const) in standardized units.
  Eigen::VectorXd whitened_;
  // Posterior mean / variance at candidates in standardized units.
  Eigen::VectorXd mean_std_units_;
  Eigen::VectorXd var_std_units_;

  mutable std::shared_ptr<const PriorSampler> sampler_;
};

/// Posterior marginals of `data` under `kernel` at `candidates`. Candidates
/// that coincide exactly with a data point are marked evaluated.
PosteriorState posterior(const Dataset& data, const KernelSpec& kernel, const Points& candidates);

/// Assemble a PosteriorState from a conditioned model plus bookkeeping.
PosteriorState make_state(const ConditionedGp& gp, const std::vector<std::uint8_t>& evaluated,
                          const Eigen::VectorXd& observed, double incumbent);

/// One exact prior draw on `grid`; deterministic per seed.
Eigen::VectorXd sample_prior_function(const KernelSpec& kernel, const Points& grid,
                                      std::uint64_t seed);

/// `count` joint posterior draws, one path per row (count x |candidates|).
Eigen::MatrixXd sample_posterior_paths(const Dataset& data, const KernelSpec& kernel,
                                       const Points& candidates, Eigen::Index count,
                                       std::uint64_t seed);

struct UEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo estimate of mean_const - E[min over grid of a prior draw].
UEstimate estimate_U(const KernelSpec& kernel, const Points& grid, Eigen::Index draws,
                     std::uint64_t seed);

/// Evenly spaced 1D grid of `size` points on [0, 1].
Points unit_grid(Eigen::Index size);

// -- hyperparameter fitting --------------------------------------------------

struct FitOptions {
  double lengthscale_min = 0.01;
  double lengthscale_max = 10.0;
  double output_scale_min = 1e-3;
  double output_scale_max = 1e2;
  /// One lengthscale per input dimension instead of a shared one.
  bool ard = false;
  int starts = 8;
  int max_iterations = 100;
};

/// Negative log marginal likelihood with the constant mean profiled out
/// (generalized least squares); returns the profiled mean in `mean_out`.
double profiled_nll(const Dataset& data, const KernelSpec& kernel, double* mean_out = nullptr,
                    Eigen::VectorXd* grad_log_params = nullptr);

/// Maximum marginal likelihood fit: multi-start projected BFGS on the log
/// lengthscales and log output scale, constant mean profiled. When the data
/// are standardized the returned kernel lives in standardized units.
KernelSpec fit_hyperparameters(const Dataset& data, const FitOptions& options, std::uint64_t seed,
                               const std::optional<KernelSpec>& warm_start = std::nullopt);

}  // namespace costbo
