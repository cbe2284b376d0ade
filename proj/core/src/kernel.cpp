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

#include "costbo/kernel.hpp"

#include <cmath>
#include <string>

#include "costbo/error.hpp"

namespace costbo {

namespace {
constexpr double kSqrt5 = 2.23606797749978969641;
}

KernelSpec KernelSpec::isotropic(double lengthscale, double output_scale, double mean_const) {
  return KernelSpec{{lengthscale}, output_scale, mean_const};
}

void KernelSpec::validate(std::size_t dim) const {
  if (lengthscales.empty() || (lengthscales.size() != 1 && lengthscales.size() != dim)) {
    throw InvalidArgument("kernel: expected 1 or " + std::to_string(dim) + " lengthscales, got " +
                          std::to_string(lengthscales.size()));
  }
  for (double l : lengthscales) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw InvalidArgument("kernel: lengthscale must be positive and finite");
    }
  }
  if (!(output_scale >= 0.0) || !std::isfinite(output_scale)) {
    throw InvalidArgument("kernel: output_scale must be non-negative and finite");
  }
  if (!std::isfinite(mean_const)) {
    throw InvalidArgument("kernel: mean_const must be finite");
  }
}

double KernelSpec::prior_std() const { return std::sqrt(output_scale); }

double KernelSpec::scaled_distance(std::span<const double> a, std::span<const double> b) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) / lengthscale(i);
    sum += d * d;
  }
  return std::sqrt(sum);
}

double KernelSpec::operator()(std::span<const double> a, std::span<const double> b) const {
  return output_scale * matern52(scaled_distance(a, b));
}

double matern52(double r) {
  const double s = kSqrt5 * r;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

std::span<const double> row(const Points& points, Eigen::Index i) {
  return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Points& a, const Points& b) {
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const auto ai = row(a, i);
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      out(i, j) = kernel(ai, row(b, j));
    }
  }
  return out;
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Points& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = kernel.output_scale;
    const auto ai = row(a, i);
    for (Eigen::Index j = 0; j < i; ++j) {
      out(i, j) = out(j, i) = kernel(ai, row(a, j));
    }
  }
  return out;
}

Eigen::VectorXd kernel_row(const KernelSpec& kernel, std::span<const double> x,
                           const Points& candidates) {
  Eigen::VectorXd out(candidates.rows());
  if (candidates.cols() == 1 && kernel.is_isotropic()) {
    const double inv_l = 1.0 / kernel.lengthscales.front();
    const double x0 = x[0];
    for (Eigen::Index j = 0; j < candidates.rows(); ++j) {
      out[j] = kernel.output_scale * matern52(std::abs(candidates(j, 0) - x0) * inv_l);
    }
    return out;
  }
  for (Eigen::Index j = 0; j < candidates.rows(); ++j) {
    out[j] = kernel(x, row(candidates, j));
  }
  return out;
}

}  // namespace costbo
