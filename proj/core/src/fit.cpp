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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "costbo/error.hpp"
#include "costbo/gp.hpp"

namespace costbo {

namespace {

constexpr double kSqrt5 = 2.23606797749978969641;
constexpr double kLog2Pi = 1.83787706640934548356;

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

KernelSpec unpack(const Eigen::VectorXd& theta, std::size_t lengthscale_count) {
  KernelSpec k;
  k.lengthscales.resize(lengthscale_count);
  for (std::size_t i = 0; i < lengthscale_count; ++i) {
    k.lengthscales[i] = std::exp(theta[static_cast<Eigen::Index>(i)]);
  }
  k.output_scale = std::exp(theta[static_cast<Eigen::Index>(lengthscale_count)]);
  return k;
}

std::string closest_pair(const Points& points) {
  double best = INFINITY;
  Eigen::Index bi = 0;
  Eigen::Index bj = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d = (points.row(i) - points.row(j)).norm();
      if (d < best) {
        best = d;
        bi = j;
        bj = i;
      }
    }
  }
  std::ostringstream out;
  out << "closest points #" << bi << " and #" << bj << " at distance " << best;
  return out.str();
}

struct Objective {
  const Dataset& data;
  std::size_t lengthscale_count;
  int evaluations = 0;

  // Returns +inf when the kernel matrix cannot be factored.
  double operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& grad, double& mean) {
    ++evaluations;
    KernelSpec k = unpack(theta, lengthscale_count);
    try {
      return profiled_nll(data, k, &mean, &grad);
    } catch (const NumericalError&) {
      grad.setZero(theta.size());
      return INFINITY;
    }
  }
};

struct LocalResult {
  Eigen::VectorXd theta;
  double value = INFINITY;
  double mean = 0.0;
};

// Projected BFGS with Armijo backtracking along the projection arc.
LocalResult minimize_in_box(Objective& f, Eigen::VectorXd x, const Box& box, int max_iterations) {
  const Eigen::Index p = x.size();
  x = box.clamp(x);
  Eigen::VectorXd g(p);
  double mean = 0.0;
  double value = f(x, g, mean);
  LocalResult best{x, value, mean};
  if (!std::isfinite(value)) return best;

  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(p, p);
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd projected = g;
    std::vector<bool> active(static_cast<std::size_t>(p), false);
    for (Eigen::Index i = 0; i < p; ++i) {
      if ((x[i] <= box.lo[i] && g[i] > 0.0) || (x[i] >= box.hi[i] && g[i] < 0.0)) {
        projected[i] = 0.0;
        active[static_cast<std::size_t>(i)] = true;
      }
    }
    if (projected.lpNorm<Eigen::Infinity>() < 1e-6) break;

    Eigen::VectorXd dir = -(inv_hessian * projected);
    for (Eigen::Index i = 0; i < p; ++i) {
      if (active[static_cast<std::size_t>(i)]) dir[i] = 0.0;
    }
    if (dir.dot(projected) >= 0.0) {
      inv_hessian.setIdentity();
      dir = -projected;
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new;
    Eigen::VectorXd g_new(p);
    double v_new = INFINITY;
    double m_new = 0.0;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = box.clamp(x + step * dir);
      v_new = f(x_new, g_new, m_new);
      if (std::isfinite(v_new) && v_new <= value + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
      inv_hessian = (eye - rho * s * y.transpose()) * inv_hessian * (eye - rho * y * s.transpose()) +
                    rho * s * s.transpose();
    }
    const double improvement = value - v_new;
    x = x_new;
    g = g_new;
    value = v_new;
    best = {x, value, m_new};
    if (improvement < 1e-10 * (1.0 + std::abs(value))) break;
  }
  return best;
}

}  // namespace

double profiled_nll(const Dataset& data, const KernelSpec& kernel, double* mean_out,
                    Eigen::VectorXd* grad_log_params) {
  const Eigen::Index n = data.size();
  const Points& x = data.points;
  const OutcomeTransform t =
      data.standardize ? OutcomeTransform::fit(data.values) : OutcomeTransform::identity();
  const Eigen::VectorXd y = ((data.values.array() - t.shift) / t.scale).matrix();

  Eigen::MatrixXd signal = kernel_matrix(kernel, x);
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool ok = false;
  for (double jitter = kNoiseVariance; jitter <= kMaxJitter * 1.0001; jitter *= 10.0) {
    Eigen::MatrixXd k = signal;
    k.diagonal().array() += jitter;
    llt.compute(k);
    if (llt.info() == Eigen::Success) {
      ok = true;
      break;
    }
  }
  if (!ok) throw NumericalError("marginal likelihood: kernel matrix not positive definite");

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd kinv_ones = llt.solve(ones);
  const Eigen::VectorXd kinv_y = llt.solve(y);
  const double mean = ones.dot(kinv_y) / ones.dot(kinv_ones);
  const Eigen::VectorXd alpha = kinv_y - mean * kinv_ones;
  const Eigen::VectorXd resid = y.array() - mean;
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double nll = 0.5 * resid.dot(alpha) + 0.5 * logdet + 0.5 * double(n) * kLog2Pi;
  if (mean_out) *mean_out = mean;

  if (grad_log_params) {
    const std::size_t lcount = kernel.lengthscales.size();
    Eigen::VectorXd& grad = *grad_log_params;
    grad.setZero(static_cast<Eigen::Index>(lcount + 1));
    // d nll / d theta = 0.5 * sum((K^{-1} - alpha alpha^T) .* dK/dtheta)
    Eigen::MatrixXd w = llt.solve(Eigen::MatrixXd::Identity(n, n));
    w.noalias() -= alpha * alpha.transpose();
    grad[static_cast<Eigen::Index>(lcount)] = 0.5 * (w.cwiseProduct(signal)).sum();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        const double r = kernel.scaled_distance(row(x, i), row(x, j));
        const double common =
            kernel.output_scale * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
        const double wij = w(i, j);  // symmetric pair counted twice below
        if (lcount == 1) {
          grad[0] += wij * common * r * r;
        } else {
          for (std::size_t a = 0; a < lcount; ++a) {
            const double d = (x(i, static_cast<Eigen::Index>(a)) - x(j, static_cast<Eigen::Index>(a))) /
                             kernel.lengthscales[a];
            grad[static_cast<Eigen::Index>(a)] += wij * common * d * d;
          }
        }
      }
    }
  }
  return nll;
}

KernelSpec fit_hyperparameters(const Dataset& data, const FitOptions& options, std::uint64_t seed,
                               const std::optional<KernelSpec>& warm_start) {
  data.validate();
  if (data.size() < 2) {
    throw FitError("fit_hyperparameters: need at least 2 observations, got " +
                   std::to_string(data.size()));
  }
  if (!(options.lengthscale_min > 0.0 && options.lengthscale_max >= options.lengthscale_min &&
        options.output_scale_min > 0.0 && options.output_scale_max >= options.output_scale_min)) {
    throw InvalidArgument("fit_hyperparameters: invalid bounds");
  }
  const std::size_t lcount = options.ard ? static_cast<std::size_t>(data.dim()) : 1;
  const Eigen::Index p = static_cast<Eigen::Index>(lcount + 1);
  Box box{Eigen::VectorXd(p), Eigen::VectorXd(p)};
  box.lo.head(p - 1).setConstant(std::log(options.lengthscale_min));
  box.hi.head(p - 1).setConstant(std::log(options.lengthscale_max));
  box.lo[p - 1] = std::log(options.output_scale_min);
  box.hi[p - 1] = std::log(options.output_scale_max);

  std::vector<Eigen::VectorXd> starts;
  if (warm_start && (warm_start->lengthscales.size() == lcount ||
                     warm_start->lengthscales.size() == 1)) {
    Eigen::VectorXd s(p);
    for (std::size_t i = 0; i < lcount; ++i) {
      s[static_cast<Eigen::Index>(i)] =
          std::log(warm_start->lengthscales[warm_start->lengthscales.size() == 1 ? 0 : i]);
    }
    s[p - 1] = std::log(std::max(warm_start->output_scale, options.output_scale_min));
    starts.push_back(box.clamp(s));
  } else {
    Eigen::VectorXd s(p);
    s.head(p - 1).setConstant(std::log(std::clamp(0.2, options.lengthscale_min, options.lengthscale_max)));
    s[p - 1] = std::log(std::clamp(1.0, options.output_scale_min, options.output_scale_max));
    starts.push_back(s);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(starts.size()) < std::max(1, options.starts)) {
    Eigen::VectorXd s(p);
    for (Eigen::Index i = 0; i < p; ++i) s[i] = box.lo[i] + unit(rng) * (box.hi[i] - box.lo[i]);
    starts.push_back(s);
  }

  Objective objective{data, lcount};
  LocalResult best;
  for (const auto& s : starts) {
    LocalResult r = minimize_in_box(objective, s, box, options.max_iterations);
    if (r.value < best.value) best = r;
  }
  if (!std::isfinite(best.value)) {
    throw FitError("fit_hyperparameters: kernel matrix singular at every start after jitter "
                   "escalation; " + closest_pair(data.points));
  }
  KernelSpec fitted = unpack(best.theta, lcount);
  fitted.mean_const = best.mean;
  return fitted;
}

}  // namespace costbo
