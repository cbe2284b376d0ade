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

#include "costbo/prior_sampler.hpp"

#include <Eigen/Eigenvalues>
#include <boost/random/normal_distribution.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "costbo/error.hpp"

namespace costbo {

namespace {

constexpr double kSqrt5 = 2.23606797749978969641;

// Symmetric square root with negative eigenvalues clamped to zero.
Eigen::Matrix3d psd_sqrt(const Eigen::Matrix3d& m) {
  const Eigen::Matrix3d sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sym);
  Eigen::Vector3d values = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * values.asDiagonal();
}

struct Matern52StateSpace {
  Eigen::Matrix3d drift;
  Eigen::Matrix3d stationary;
  double spectral_density;

  Matern52StateSpace(double lengthscale, double variance) {
    const double lam = kSqrt5 / lengthscale;
    drift << 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, -lam * lam * lam, -3.0 * lam * lam, -3.0 * lam;
    const double kappa = variance * lam * lam / 3.0;
    stationary << variance, 0.0, -kappa, 0.0, kappa, 0.0, -kappa, 0.0,
        variance * lam * lam * lam * lam;
    spectral_density = 16.0 / 3.0 * variance * std::pow(lam, 5);
  }

  // Discretization over a gap `dt`. Short gaps go through Van Loan's block
  // exponential so the process noise does not cancel against the stationary
  // covariance.
  void discretize(double dt, Eigen::Matrix3d& transition, Eigen::Matrix3d& noise) const {
    if (dt <= 0.0) {
      transition.setIdentity();
      noise.setZero();
      return;
    }
    const double lam = -drift(2, 2) / 3.0;
    if (lam * dt > 1.0) {
      transition = (drift * dt).exp();
      noise = stationary - transition * stationary * transition.transpose();
      return;
    }
    Eigen::Matrix<double, 6, 6> block = Eigen::Matrix<double, 6, 6>::Zero();
    block.topLeftCorner<3, 3>() = -drift;
    block(2, 5) = spectral_density;
    block.bottomRightCorner<3, 3>() = drift.transpose();
    const Eigen::Matrix<double, 6, 6> e = (block * dt).exp();
    transition = e.bottomRightCorner<3, 3>().transpose();
    noise = transition * e.topRightCorner<3, 3>();
  }
};

}  // namespace

PriorSampler::PriorSampler(const KernelSpec& kernel, const Points& grid)
    : size_(grid.rows()), mean_(kernel.mean_const) {
  if (grid.rows() == 0) {
    throw InvalidArgument("prior sampler: empty grid");
  }
  kernel.validate(static_cast<std::size_t>(grid.cols()));
  if (kernel.output_scale == 0.0) {
    degenerate_ = true;
    return;
  }
  if (grid.cols() == 1) {
    build_state_space(kernel, grid);
  } else {
    build_dense(kernel, grid);
  }
}

void PriorSampler::build_state_space(const KernelSpec& kernel, const Points& grid) {
  state_space_ = true;
  const Eigen::Index n = grid.rows();
  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), Eigen::Index{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return grid(a, 0) < grid(b, 0); });

  const Matern52StateSpace model(kernel.lengthscale(0), kernel.output_scale);
  stationary_sqrt_ = psd_sqrt(model.stationary);

  std::vector<double> gaps;
  gaps.reserve(order_.size());
  for (std::size_t k = 1; k < order_.size(); ++k) {
    gaps.push_back(grid(order_[k], 0) - grid(order_[k - 1], 0));
  }
  if (gaps.empty()) {
    return;
  }
  const auto [lo, hi] = std::minmax_element(gaps.begin(), gaps.end());
  const bool uniform = (*hi - *lo) <= 1e-12 * std::max(1.0, std::abs(*hi));
  const std::size_t count = uniform ? 1 : gaps.size();
  steps_.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    Eigen::Matrix3d noise;
    model.discretize(uniform ? *hi : gaps[k], steps_[k].transition, noise);
    steps_[k].noise_sqrt = psd_sqrt(noise);
  }
}

void PriorSampler::build_dense(const KernelSpec& kernel, const Points& grid) {
  if (grid.rows() > kMaxDenseGrid) {
    throw SizeError("prior sampler: grid of " + std::to_string(grid.rows()) +
                    " points exceeds the dense limit of " + std::to_string(kMaxDenseGrid));
  }
  Eigen::MatrixXd cov = kernel_matrix(kernel, grid);
  for (double jitter = 1e-10; jitter <= 1e-6 * 1.0001; jitter *= 10.0) {
    Eigen::MatrixXd shifted = cov;
    shifted.diagonal().array() += jitter * kernel.output_scale;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      chol_ = llt.matrixL();
      return;
    }
  }
  throw NumericalError("prior sampler: covariance not positive definite after jitter 1e-6");
}

Eigen::VectorXd PriorSampler::draw(std::mt19937_64& rng) const {
  Eigen::VectorXd out(size_);
  draw_into(rng, out);
  return out;
}

void PriorSampler::draw_into(std::mt19937_64& rng, Eigen::Ref<Eigen::VectorXd> out) const {
  boost::random::normal_distribution<double> normal;
  if (degenerate_) {
    out.setConstant(mean_);
    return;
  }
  if (!state_space_) {
    Eigen::VectorXd z(size_);
    for (Eigen::Index i = 0; i < size_; ++i) z[i] = normal(rng);
    out.noalias() = chol_.triangularView<Eigen::Lower>() * z;
    out.array() += mean_;
    return;
  }
  Eigen::Vector3d z(normal(rng), normal(rng), normal(rng));
  Eigen::Vector3d state = stationary_sqrt_ * z;
  out[order_[0]] = mean_ + state[0];
  for (std::size_t k = 1; k < order_.size(); ++k) {
    const Step& s = step(k - 1);
    z = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
    state = s.transition * state + s.noise_sqrt * z;
    out[order_[k]] = mean_ + state[0];
  }
}

Eigen::MatrixXd PriorSampler::draw_many(Eigen::Index count, std::mt19937_64& rng) const {
  Eigen::MatrixXd out(size_, count);
  for (Eigen::Index c = 0; c < count; ++c) {
    draw_into(rng, out.col(c));
  }
  return out;
}

Eigen::MatrixXd PriorSampler::linear_map() const {
  if (degenerate_) {
    return Eigen::MatrixXd::Zero(size_, 1);
  }
  if (!state_space_) {
    return chol_;
  }
  const Eigen::Index n = size_;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, 3 * n);
  Eigen::MatrixXd state = Eigen::MatrixXd::Zero(3, 3 * n);
  state.leftCols<3>() = stationary_sqrt_;
  out.row(order_[0]) = state.row(0);
  for (std::size_t k = 1; k < order_.size(); ++k) {
    const Step& s = step(k - 1);
    state = s.transition * state;
    state.middleCols(3 * static_cast<Eigen::Index>(k), 3) += s.noise_sqrt;
    out.row(order_[k]) = state.row(0);
  }
  return out;
}

}  // namespace costbo
