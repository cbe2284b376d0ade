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
#include <random>
#include <vector>

#include "costbo/kernel.hpp"

namespace costbo {

/// Largest point set the dense Cholesky path accepts.
inline constexpr Eigen::Index kMaxDenseGrid = 20000;

/// Exact joint draws from the Matern-5/2 GP prior on a fixed point set.
///
/// One-dimensional sets use the Gauss-Markov (state-space) form of the
/// Matern-5/2 process, which produces exact draws in O(n). Higher-dimensional
/// sets factor the dense covariance once and reuse the factor.
class PriorSampler {
 public:
  PriorSampler(const KernelSpec& kernel, const Points& grid);

  Eigen::Index size() const { return size_; }
  bool uses_state_space() const { return state_space_; }

  /// One draw including the constant prior mean.
  Eigen::VectorXd draw(std::mt19937_64& rng) const;
  void draw_into(std::mt19937_64& rng, Eigen::Ref<Eigen::VectorXd> out) const;

  /// `count` independent draws, one per column.
  Eigen::MatrixXd draw_many(Eigen::Index count, std::mt19937_64& rng) const;

  /// Linear map M with draw = mean + M * z for z ~ N(0, I). Exposed for
  /// verifying the implied covariance on small sets; O(n^2) memory.
  Eigen::MatrixXd linear_map() const;

 private:
  struct Step {
    Eigen::Matrix3d transition;
    Eigen::Matrix3d noise_sqrt;
  };

  void build_state_space(const KernelSpec& kernel, const Points& grid);
  void build_dense(const KernelSpec& kernel, const Points& grid);
  const Step& step(std::size_t k) const { return steps_.size() == 1 ? steps_[0] : steps_[k]; }

  Eigen::Index size_ = 0;
  double mean_ = 0.0;
  bool degenerate_ = false;
  bool state_space_ = false;

  // state-space form
  std::vector<Eigen::Index> order_;
  Eigen::Matrix3d stationary_sqrt_ = Eigen::Matrix3d::Zero();
  std::vector<Step> steps_;

  // dense form
  Eigen::MatrixXd chol_;
};

}  // namespace costbo
