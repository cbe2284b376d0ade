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
#include <span>
#include <vector>

namespace costbo {

/// Candidate and data points, one point per row, coordinates in [0, 1]^d.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Matern-5/2 covariance with a constant prior mean.
///
/// `lengthscales` holds either one value (isotropic) or one per input
/// dimension. `output_scale` is the signal variance, so the prior standard
/// deviation at any point is sqrt(output_scale).
struct KernelSpec {
  std::vector<double> lengthscales{0.1};
  double output_scale = 1.0;
  double mean_const = 0.0;

  static KernelSpec isotropic(double lengthscale, double output_scale = 1.0,
                              double mean_const = 0.0);

  /// Throws InvalidArgument unless the spec is usable on `dim` inputs.
  void validate(std::size_t dim) const;

  double lengthscale(std::size_t axis) const {
    return lengthscales.size() == 1 ? lengthscales.front() : lengthscales[axis];
  }
  bool is_isotropic() const { return lengthscales.size() == 1; }
  double prior_std() const;

  double scaled_distance(std::span<const double> a, std::span<const double> b) const;
  double operator()(std::span<const double> a, std::span<const double> b) const;
};

/// Unit-amplitude Matern-5/2 profile (1 + sqrt5 r + 5 r^2 / 3) exp(-sqrt5 r).
double matern52(double r);

std::span<const double> row(const Points& points, Eigen::Index i);

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Points& a, const Points& b);
Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Points& a);

/// k(x, candidates[j]) for every candidate row j.
Eigen::VectorXd kernel_row(const KernelSpec& kernel, std::span<const double> x,
                           const Points& candidates);

}  // namespace costbo
