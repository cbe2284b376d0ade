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

#include "costbo/gp.hpp"

#include <Eigen/Eigenvalues>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "costbo/error.hpp"

namespace costbo {

namespace {

Eigen::Index find_exact_row(const Points& candidates, std::span<const double> x) {
  for (Eigen::Index j = 0; j < candidates.rows(); ++j) {
    const auto c = row(candidates, j);
    if (std::equal(c.begin(), c.end(), x.begin())) {
      return j;
    }
  }
  return -1;
}

std::string condition_note(const Eigen::MatrixXd& k) {
  if (k.rows() == 0 || k.rows() > 1500) {
    return "condition estimate unavailable";
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  std::ostringstream out;
  out << "condition estimate " << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity())
      << " (eigenvalues in [" << lo << ", " << hi << "])";
  return out.str();
}

}  // namespace

// -- Dataset -----------------------------------------------------------------

Dataset::Dataset(Points p, Eigen::VectorXd v, bool standardize_values)
    : points(std::move(p)), values(std::move(v)), standardize(standardize_values) {
  validate();
}

Dataset Dataset::empty(Eigen::Index dim, bool standardize_values) {
  Dataset d;
  d.points.resize(0, dim);
  d.values.resize(0);
  d.standardize = standardize_values;
  return d;
}

void Dataset::append(std::span<const double> x, double y) {
  if (points.cols() == 0 && points.rows() == 0) {
    points.resize(0, static_cast<Eigen::Index>(x.size()));
  }
  if (static_cast<Eigen::Index>(x.size()) != points.cols()) {
    throw InvalidArgument("dataset: point dimension mismatch");
  }
  const Eigen::Index n = points.rows();
  points.conservativeResize(n + 1, Eigen::NoChange);
  for (Eigen::Index i = 0; i < points.cols(); ++i) points(n, i) = x[static_cast<std::size_t>(i)];
  values.conservativeResize(n + 1);
  values[n] = y;
}

void Dataset::validate() const {
  if (points.rows() != values.size()) {
    throw InvalidArgument("dataset: " + std::to_string(points.rows()) + " points but " +
                          std::to_string(values.size()) + " values");
  }
  if (!values.allFinite() || !points.allFinite()) {
    throw InvalidArgument("dataset: non-finite entries");
  }
}

OutcomeTransform OutcomeTransform::fit(const Eigen::VectorXd& values) {
  OutcomeTransform t;
  if (values.size() == 0) return t;
  t.shift = values.mean();
  if (values.size() > 1) {
    const double var = (values.array() - t.shift).square().sum() / double(values.size() - 1);
    if (var > 0.0) t.scale = std::sqrt(var);
  }
  return t;
}

std::size_t PosteriorState::unevaluated_count() const {
  return static_cast<std::size_t>(std::count(evaluated.begin(), evaluated.end(), 0));
}

// -- ConditionedGp -----------------------------------------------------------

ConditionedGp::ConditionedGp(KernelSpec kernel, std::shared_ptr<const Points> candidates,
                             bool standardize)
    : kernel_(std::move(kernel)), candidates_(std::move(candidates)), standardize_(standardize) {
  if (!candidates_ || candidates_->rows() == 0) {
    throw InvalidArgument("posterior: candidate set is empty");
  }
  kernel_.validate(static_cast<std::size_t>(candidates_->cols()));
  data_ = Dataset::empty(candidates_->cols(), standardize_);
  rebuild();
}

void ConditionedGp::reset(const Dataset& data) { reset(data, kernel_); }

void ConditionedGp::reset(const Dataset& data, const KernelSpec& kernel) {
  data.validate();
  if (data.size() > 0 && data.dim() != candidates_->cols()) {
    throw InvalidArgument("posterior: data and candidates differ in dimension");
  }
  kernel.validate(static_cast<std::size_t>(candidates_->cols()));
  const bool kernel_changed = kernel.lengthscales != kernel_.lengthscales ||
                              kernel.output_scale != kernel_.output_scale ||
                              kernel.mean_const != kernel_.mean_const;
  kernel_ = kernel;
  if (kernel_changed) sampler_.reset();
  data_ = data;
  data_.standardize = standardize_;
  jitter_ = kNoiseVariance;
  if (data_.size() == 0) data_.points.resize(0, candidates_->cols());
  data_candidate_index_.clear();
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    data_candidate_index_.push_back(find_exact_row(*candidates_, row(data_.points, i)));
  }
  rebuild();
}

void ConditionedGp::ensure_capacity(Eigen::Index n) {
  if (chol_.rows() >= n) return;
  const Eigen::Index cap = std::max<Eigen::Index>(n, 2 * chol_.rows() + 8);
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(cap, cap);
  const Eigen::Index old = std::min(chol_.rows(), data_.size());
  chol.topLeftCorner(old, old) = chol_.topLeftCorner(old, old);
  chol_.swap(chol);
  Eigen::MatrixXd cross(candidates_->rows(), cap);
  if (old > 0) cross.leftCols(old) = cross_.leftCols(old);
  cross_.swap(cross);
  whitened_.conservativeResize(cap);
}

bool ConditionedGp::try_factor(double jitter) {
  const Eigen::Index n = data_.size();
  Eigen::MatrixXd k = kernel_matrix(kernel_, data_.points);
  k.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return false;
  ensure_capacity(n);
  chol_.topLeftCorner(n, n) = llt.matrixL();
  return true;
}

void ConditionedGp::rebuild() {
  const Eigen::Index n = data_.size();
  const Eigen::Index m = candidates_->rows();
  transform_ = standardize_ ? OutcomeTransform::fit(data_.values) : OutcomeTransform::identity();
  if (n == 0) {
    mean_std_units_ = Eigen::VectorXd::Constant(m, kernel_.mean_const);
    var_std_units_ = Eigen::VectorXd::Constant(m, kernel_.output_scale);
    return;
  }
  bool ok = false;
  for (double jitter = std::max(jitter_, kNoiseVariance); jitter <= kMaxJitter * 1.0001;
       jitter *= 10.0) {
    if (try_factor(jitter)) {
      jitter_ = jitter;
      ok = true;
      break;
    }
  }
  if (!ok) {
    Eigen::MatrixXd k = kernel_matrix(kernel_, data_.points);
    k.diagonal().array() += kMaxJitter;
    throw NumericalError("posterior: Cholesky failed after jitter escalation to 1e-4; " +
                         condition_note(k));
  }
  const auto lower = chol_.topLeftCorner(n, n).triangularView<Eigen::Lower>();

  Eigen::MatrixXd k_xc(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    k_xc.row(i) = kernel_row(kernel_, row(data_.points, i), *candidates_).transpose();
  }
  lower.solveInPlace(k_xc);
  cross_.leftCols(n) = k_xc.transpose();

  Eigen::VectorXd centred =
      (data_.values.array() - transform_.shift) / transform_.scale - kernel_.mean_const;
  lower.solveInPlace(centred);
  whitened_.head(n) = centred;

  mean_std_units_ = Eigen::VectorXd::Constant(m, kernel_.mean_const);
  mean_std_units_.noalias() += cross_.leftCols(n) * whitened_.head(n);
  var_std_units_ = Eigen::VectorXd::Constant(m, kernel_.output_scale);
  var_std_units_ -= cross_.leftCols(n).rowwise().squaredNorm();
}

void ConditionedGp::add_candidate(Eigen::Index index, double y) {
  if (index < 0 || index >= candidates_->rows()) {
    throw InvalidArgument("posterior: candidate index out of range");
  }
  append_internal(row(*candidates_, index), index, y);
}

void ConditionedGp::add_point(std::span<const double> x, double y) {
  if (static_cast<Eigen::Index>(x.size()) != candidates_->cols()) {
    throw InvalidArgument("posterior: point dimension mismatch");
  }
  append_internal(x, find_exact_row(*candidates_, x), y);
}

void ConditionedGp::append_internal(std::span<const double> x, Eigen::Index candidate_index,
                                    double y) {
  if (!std::isfinite(y)) throw InvalidArgument("posterior: non-finite observation");
  const Eigen::Index n = data_.size();
  if (standardize_) {
    data_.append(x, y);
    data_candidate_index_.push_back(candidate_index);
    rebuild();
    return;
  }

  Eigen::VectorXd k_new(n);
  for (Eigen::Index i = 0; i < n; ++i) k_new[i] = kernel_(row(data_.points, i), x);
  if (n > 0) chol_.topLeftCorner(n, n).triangularView<Eigen::Lower>().solveInPlace(k_new);
  const double d2 = kernel_.output_scale + jitter_ - k_new.squaredNorm();

  data_.append(x, y);
  data_candidate_index_.push_back(candidate_index);
  if (!(d2 > 0.5 * jitter_)) {
    // Lost positive definiteness in the rank-one update; refactor with more jitter.
    jitter_ *= 10.0;
    if (jitter_ > kMaxJitter * 1.0001) {
      jitter_ = kMaxJitter;
    }
    rebuild();
    return;
  }
  const double d = std::sqrt(d2);
  ensure_capacity(n + 1);
  chol_.row(n).head(n) = k_new.transpose();
  chol_(n, n) = d;

  Eigen::VectorXd v = kernel_row(kernel_, x, *candidates_);
  if (n > 0) v.noalias() -= cross_.leftCols(n) * k_new;
  v /= d;
  const double w = (y - kernel_.mean_const - (n > 0 ? k_new.dot(whitened_.head(n)) : 0.0)) / d;
  cross_.col(n) = v;
  whitened_[n] = w;
  mean_std_units_ += w * v;
  var_std_units_ -= v.cwiseAbs2();
}

Eigen::VectorXd ConditionedGp::mean() const {
  return (transform_.shift + transform_.scale * mean_std_units_.array()).matrix();
}

Eigen::VectorXd ConditionedGp::std() const {
  return (transform_.scale * var_std_units_.array().max(0.0).sqrt()).matrix();
}

const PriorSampler& ConditionedGp::prior_sampler() const {
  if (!sampler_) sampler_ = std::make_shared<const PriorSampler>(kernel_, *candidates_);
  return *sampler_;
}

Eigen::MatrixXd ConditionedGp::sample_paths(Eigen::Index count, std::mt19937_64& rng) const {
  const Eigen::Index n = data_.size();
  for (Eigen::Index idx : data_candidate_index_) {
    if (idx < 0) {
      throw InvalidArgument("posterior paths: every observation must be a candidate");
    }
  }
  Eigen::MatrixXd paths = prior_sampler().draw_many(count, rng);
  if (n > 0) {
    boost::random::normal_distribution<double> normal;
    const double noise_sd = std::sqrt(jitter_);
    Eigen::MatrixXd residual(n, count);
    for (Eigen::Index c = 0; c < count; ++c) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double ys = (data_.values[i] - transform_.shift) / transform_.scale;
        residual(i, c) = ys - paths(data_candidate_index_[static_cast<std::size_t>(i)], c) -
                         noise_sd * normal(rng);
      }
    }
    chol_.topLeftCorner(n, n).triangularView<Eigen::Lower>().solveInPlace(residual);
    paths.noalias() += cross_.leftCols(n) * residual;
  }
  paths.array() = transform_.shift + transform_.scale * paths.array();
  return paths;
}

// -- free functions ------------------------------------------------------------

PosteriorState make_state(const ConditionedGp& gp, const std::vector<std::uint8_t>& evaluated,
                          const Eigen::VectorXd& observed, double incumbent) {
  PosteriorState s;
  s.candidates = gp.shared_candidates();
  s.mean = gp.mean();
  s.std = gp.std();
  s.incumbent = incumbent;
  s.t = static_cast<std::size_t>(gp.num_data());
  s.evaluated = evaluated;
  s.observed = observed;
  return s;
}

PosteriorState posterior(const Dataset& data, const KernelSpec& kernel, const Points& candidates) {
  auto shared = std::make_shared<const Points>(candidates);
  ConditionedGp gp(kernel, shared, data.standardize);
  gp.reset(data);
  const Eigen::Index m = candidates.rows();
  std::vector<std::uint8_t> evaluated(static_cast<std::size_t>(m), 0);
  Eigen::VectorXd observed = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
  double incumbent = INFINITY;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    incumbent = std::min(incumbent, data.values[i]);
    const Eigen::Index j = find_exact_row(candidates, row(data.points, i));
    if (j >= 0) {
      evaluated[static_cast<std::size_t>(j)] = 1;
      observed[j] = std::isnan(observed[j]) ? data.values[i] : std::min(observed[j], data.values[i]);
    }
  }
  return make_state(gp, evaluated, observed, incumbent);
}

Eigen::VectorXd sample_prior_function(const KernelSpec& kernel, const Points& grid,
                                      std::uint64_t seed) {
  if (grid.rows() > kMaxDenseGrid) {
    throw SizeError("sample_prior_function: grid of " + std::to_string(grid.rows()) +
                    " points exceeds " + std::to_string(kMaxDenseGrid));
  }
  PriorSampler sampler(kernel, grid);
  std::mt19937_64 rng(seed);
  return sampler.draw(rng);
}

Eigen::MatrixXd sample_posterior_paths(const Dataset& data, const KernelSpec& kernel,
                                       const Points& candidates, Eigen::Index count,
                                       std::uint64_t seed) {
  if (candidates.rows() > kMaxDenseGrid) {
    throw SizeError("sample_posterior_paths: too many candidates");
  }
  data.validate();
  // Observations off the candidate set are appended so the prior draw is joint.
  Points joint = candidates;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (find_exact_row(joint, row(data.points, i)) < 0) {
      joint.conservativeResize(joint.rows() + 1, Eigen::NoChange);
      joint.row(joint.rows() - 1) = data.points.row(i);
    }
  }
  ConditionedGp gp(kernel, std::make_shared<const Points>(std::move(joint)), data.standardize);
  gp.reset(data);
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd paths = gp.sample_paths(count, rng);
  return paths.topRows(candidates.rows()).transpose();
}

UEstimate estimate_U(const KernelSpec& kernel, const Points& grid, Eigen::Index draws,
                     std::uint64_t seed) {
  if (draws < 100) throw InvalidArgument("estimate_U: need at least 100 draws");
  PriorSampler sampler(kernel, grid);
  std::mt19937_64 rng(seed);
  Eigen::VectorXd buffer(grid.rows());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < draws; ++i) {
    sampler.draw_into(rng, buffer);
    const double gap = kernel.mean_const - buffer.minCoeff();
    sum += gap;
    sum_sq += gap * gap;
  }
  const double n = static_cast<double>(draws);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

Points unit_grid(Eigen::Index size) {
  if (size < 1) throw InvalidArgument("unit_grid: size must be positive");
  Points grid(size, 1);
  for (Eigen::Index i = 0; i < size; ++i) {
    grid(i, 0) = size == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(size - 1);
  }
  return grid;
}

}  // namespace costbo
