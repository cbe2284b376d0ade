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
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "costbo/costs.hpp"
#include "costbo/gp.hpp"
#include "costbo/kernel.hpp"

namespace costbo {

/// 2(d + 1).
std::size_t default_initial_size(std::size_t dim);

inline constexpr Eigen::Index kDefault1dGrid = 10001;
inline constexpr Eigen::Index kDefaultCandidateSet = 4096;

/// An optimization instance over a fixed candidate set.
///
/// The objective is hidden from the policy: the trial loop reads it only
/// through observe(). Metrics code reads the ground truth through the
/// truth accessors.
class Problem {
 public:
  Problem(std::string name, Points candidates, Eigen::VectorXd objective, CostModel cost_model,
          std::optional<Eigen::VectorXd> test_objective = std::nullopt,
          std::optional<Eigen::VectorXd> report_raw_costs = std::nullopt);

  const std::string& name() const { return name_; }
  Eigen::Index size() const { return candidates_->rows(); }
  Eigen::Index dim() const { return candidates_->cols(); }
  const Points& candidates() const { return *candidates_; }
  std::shared_ptr<const Points> shared_candidates() const { return candidates_; }
  const CostModel& cost_model() const { return cost_model_; }
  bool tabular() const { return test_objective_.has_value(); }

  /// Objective value at candidate j, as returned to the optimizer.
  double observe(Eigen::Index j) const;

  /// Raw (unscaled) cost the policy model assigns to every candidate.
  const Eigen::VectorXd& policy_raw_costs() const { return policy_raw_; }
  /// Raw cost charged in reported metrics (differs from the policy cost only
  /// in cost-mismatch setups).
  const Eigen::VectorXd& report_raw_costs() const { return report_raw_; }

  /// Same problem under a different lambda.
  Problem with_lambda(double lambda) const;

  // -- ground truth, metrics only --
  const Eigen::VectorXd& truth_objective() const { return objective_; }
  /// Values regret is measured on: test error in tabular mode, otherwise the
  /// objective itself.
  const Eigen::VectorXd& truth_reported() const;
  double true_min() const { return objective_.minCoeff(); }
  double reported_min() const { return truth_reported().minCoeff(); }

  /// Kernel the objective was drawn from (synthetic problems).
  std::optional<KernelSpec> generating_kernel;
  /// Per-feature minimum and range used to scale tabular features.
  Eigen::VectorXd feature_min;
  Eigen::VectorXd feature_range;
  std::vector<std::string> ids;

  /// Maps scaled coordinates back to raw feature values (tabular mode).
  Eigen::VectorXd unscale(std::span<const double> x) const;

 private:
  std::string name_;
  std::shared_ptr<const Points> candidates_;
  Eigen::VectorXd objective_;
  std::optional<Eigen::VectorXd> test_objective_;
  CostModel cost_model_;
  Eigen::VectorXd policy_raw_;
  Eigen::VectorXd report_raw_;
};

/// `size` points of a seeded, randomly shifted Sobol sequence in [0, 1]^dim.
Points sobol_points(Eigen::Index dim, Eigen::Index size, std::uint64_t seed);

struct SyntheticSpec {
  Eigen::Index dim = 1;
  /// Grid size in 1D, candidate-set size otherwise.
  Eigen::Index grid_size = kDefault1dGrid;
  KernelSpec kernel = KernelSpec::isotropic(0.1);
  CostKind cost = CostKind::Uniform;
  double lambda = 0.1;
  double periodic_alpha = 2.0;
  double periodic_beta = 2.0;
  /// log-gp cost kind: which known cost plays the hidden truth.
  CostKind hidden_cost = CostKind::Periodic;
  CostEstimator estimator = CostEstimator::Exp;
};

/// Objective drawn from the GP prior on a 1D grid (or a Sobol candidate set
/// for dim >= 2); the periodic cost centres on the grid argmin.
Problem make_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

enum class CostColumn { Runtime, Proxy };
CostColumn parse_cost_column(std::string_view name);

struct TabularSpec {
  CostColumn policy_cost = CostColumn::Proxy;
  CostColumn report_cost = CostColumn::Proxy;
  double lambda = 1e-4;
  /// Hide costs behind a log-cost GP instead of handing them to the policy.
  bool unknown_cost = false;
  CostEstimator estimator = CostEstimator::Exp;
};

/// Reads `id, f1..fd, val_error, test_error, runtime[, proxy_cost]`. Features
/// are min-max scaled to [0, 1]; the objective is val_error and regret is
/// measured on test_error.
Problem load_tabular(const std::filesystem::path& path, const TabularSpec& spec);

enum class DesignMode { Sobol, RandomIds };
DesignMode parse_design_mode(std::string_view name);

/// Distinct candidate indices for the initial design. Sobol mode snaps
/// shifted Sobol points to their nearest candidates, skipping duplicates.
std::vector<Eigen::Index> initial_design(const Points& candidates, std::size_t n, DesignMode mode,
                                         std::uint64_t seed);

// -- Pandora's Box ---------------------------------------------------------------

struct PandoraBox {
  std::vector<double> support;
  std::vector<double> probs;
  double cost = 1.0;
};

struct PandoraInstance {
  std::vector<PandoraBox> boxes;
};

inline constexpr std::size_t kPandoraMaxBoxes = 5;
inline constexpr std::size_t kPandoraMaxAtoms = 6;

/// Validates probabilities (sum 1 within 1e-12), costs and size limits.
PandoraInstance make_pandora(std::vector<PandoraBox> boxes);

/// Random instance with 1..max_boxes boxes of 1..max_atoms atoms each.
PandoraInstance random_pandora(std::mt19937_64& rng, std::size_t max_boxes = 4,
                               std::size_t max_atoms = 4);

}  // namespace costbo
