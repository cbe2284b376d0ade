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

#include <doctest.h>

#include <cmath>
#include <random>

#include "costbo/error.hpp"
#include "costbo/gp.hpp"

using namespace costbo;

namespace {

double matern(double r, double ell, double s2) {
  const double a = std::sqrt(5.0) * r / ell;
  return s2 * (1.0 + a + a * a / 3.0) * std::exp(-a);
}

Points points_1d(std::initializer_list<double> xs) {
  Points p(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) p(i++, 0) = x;
  return p;
}

}  // namespace

TEST_CASE("Matern-5/2 kernel matches the closed form") {
  const KernelSpec k = KernelSpec::isotropic(0.1, 2.0);
  const double a[] = {0.2};
  const double b[] = {0.5};
  CHECK(k(a, b) == doctest::Approx(2.0 * 0.02772342191462581).epsilon(1e-13));
  CHECK(k(a, a) == doctest::Approx(2.0));
  CHECK(matern52(0.0) == 1.0);

  KernelSpec ard;
  ard.lengthscales = {0.1, 0.4};
  const double p[] = {0.1, 0.1};
  const double q[] = {0.2, 0.5};
  CHECK(ard.scaled_distance(p, q) == doctest::Approx(std::sqrt(1.0 + 1.0)));
}

TEST_CASE("kernel spec validation") {
  KernelSpec k = KernelSpec::isotropic(-1.0);
  CHECK_THROWS_AS(k.validate(1), InvalidArgument);
  k = KernelSpec::isotropic(0.1);
  k.lengthscales = {0.1, 0.2};
  CHECK_THROWS_AS(k.validate(3), InvalidArgument);
}

TEST_CASE("two-point conditioning matches the closed form") {
  const KernelSpec k = KernelSpec::isotropic(0.3);
  const Points data_x = points_1d({0.2});
  const Points cand = points_1d({0.2, 0.5, 0.9});
  Eigen::VectorXd y(1);
  y << 1.5;
  const PosteriorState s = posterior(Dataset(data_x, y), k, cand);
  const double k11 = 1.0 + kNoiseVariance;
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double k12 = matern(std::abs(cand(j, 0) - 0.2), 0.3, 1.0);
    const double mean = k12 / k11 * 1.5;
    const double var = 1.0 - k12 * k12 / k11;
    CAPTURE(j);
    CHECK(s.mean[j] == doctest::Approx(mean).epsilon(1e-10));
    CHECK(s.std[j] == doctest::Approx(std::sqrt(var)).epsilon(1e-6).scale(1e-3));
  }
  CHECK(s.is_evaluated(0));
  CHECK_FALSE(s.is_evaluated(1));
}

TEST_CASE("noiseless data are interpolated") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const KernelSpec k = KernelSpec::isotropic(0.2);
  for (int dim : {1, 3}) {
    Points x(15, dim);
    Eigen::VectorXd y(15);
    for (Eigen::Index i = 0; i < 15; ++i) {
      for (int d = 0; d < dim; ++d) x(i, d) = u(rng);
      y[i] = std::sin(7.0 * x(i, 0)) + (dim > 1 ? x(i, 1) : 0.0);
    }
    const PosteriorState s = posterior(Dataset(x, y), k, x);
    for (Eigen::Index i = 0; i < 15; ++i) {
      CHECK(std::abs(s.mean[i] - y[i]) <= 1e-4);
      CHECK(s.std[i] <= 1e-2);
    }
  }
}

TEST_CASE("incremental conditioning equals a full rebuild") {
  const KernelSpec k = KernelSpec::isotropic(0.15, 1.3, 0.2);
  auto cand = std::make_shared<const Points>(unit_grid(201));
  ConditionedGp inc(k, cand);
  Dataset data = Dataset::empty(1);
  for (Eigen::Index j : {10, 150, 77, 3, 199, 120}) {
    const double y = std::cos(6.0 * (*cand)(j, 0));
    inc.add_candidate(j, y);
    data.append(row(*cand, j), y);
  }
  ConditionedGp full(k, cand);
  full.reset(data);
  CHECK((inc.mean() - full.mean()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((inc.std() - full.std()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("standardized conditioning reports original units") {
  const KernelSpec k = KernelSpec::isotropic(0.2);
  const Points x = points_1d({0.1, 0.4, 0.8});
  Eigen::VectorXd y(3);
  y << 100.0, 140.0, 90.0;
  const PosteriorState s = posterior(Dataset(x, y, true), k, x);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(s.mean[i] == doctest::Approx(y[i]).epsilon(1e-5));
}

TEST_CASE("state-space prior reproduces the Matern covariance") {
  const KernelSpec k = KernelSpec::isotropic(0.1, 1.7);
  // Irregular spacing exercises the per-gap discretization.
  const Points grid = points_1d({0.0, 0.013, 0.05, 0.051, 0.2, 0.33, 0.34, 0.8, 1.0});
  const PriorSampler sampler(k, grid);
  REQUIRE(sampler.uses_state_space());
  const Eigen::MatrixXd m = sampler.linear_map();
  const Eigen::MatrixXd implied = m * m.transpose();
  const Eigen::MatrixXd expected = kernel_matrix(k, grid);
  CHECK((implied - expected).cwiseAbs().maxCoeff() <= 1e-8);

  const Points uniform = unit_grid(50);
  const Eigen::MatrixXd mu = PriorSampler(k, uniform).linear_map();
  CHECK(((mu * mu.transpose()) - kernel_matrix(k, uniform)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("prior draws match the closed-form marginals within 4 SE") {
  const KernelSpec k = KernelSpec::isotropic(0.1, 2.0, 0.5);
  for (Eigen::Index dim : {1, 2}) {
    Points grid;
    if (dim == 1) {
      grid = unit_grid(41);
    } else {
      grid = Points(30, 2);
      std::mt19937_64 g(9);
      std::uniform_real_distribution<double> u;
      for (Eigen::Index i = 0; i < grid.rows(); ++i) grid.row(i) << u(g), u(g);
    }
    const PriorSampler sampler(k, grid);
    std::mt19937_64 rng(11);
    const Eigen::Index n = 20000;
    const Eigen::MatrixXd draws = sampler.draw_many(n, rng);
    for (Eigen::Index i : {Eigen::Index{0}, grid.rows() / 2}) {
      const Eigen::VectorXd v = draws.row(i).transpose();
      const double mean = v.mean();
      const double var = (v.array() - mean).square().sum() / double(n - 1);
      CAPTURE(dim);
      CHECK(std::abs(mean - 0.5) <= 4.0 * std::sqrt(2.0 / double(n)));
      // Var of the sample variance of a Gaussian is 2 sigma^4 / (n - 1).
      CHECK(std::abs(var - 2.0) <= 4.0 * std::sqrt(2.0 * 4.0 / double(n - 1)));
    }
    // Covariance between two neighbours.
    const Eigen::VectorXd a = draws.row(0).transpose().array() - 0.5;
    const Eigen::VectorXd b = draws.row(1).transpose().array() - 0.5;
    const double cov = a.dot(b) / double(n);
    const double expected = k(row(grid, 0), row(grid, 1));
    const double se = std::sqrt((4.0 + expected * expected) / double(n));
    CHECK(std::abs(cov - expected) <= 4.0 * se);
  }
}

TEST_CASE("posterior paths match the posterior marginals within 4 SE") {
  const KernelSpec k = KernelSpec::isotropic(0.2);
  const Points cand = unit_grid(60);
  Dataset data = Dataset::empty(1);
  for (Eigen::Index j : {5, 30, 44}) data.append(row(cand, j), std::sin(4.0 * cand(j, 0)));
  const PosteriorState s = posterior(data, k, cand);
  const Eigen::Index n = 20000;
  const Eigen::MatrixXd paths = sample_posterior_paths(data, k, cand, n, 5);
  REQUIRE(paths.rows() == n);
  for (Eigen::Index j : {0, 17, 30, 59}) {
    const Eigen::VectorXd v = paths.col(j);
    const double mean = v.mean();
    const double var = (v.array() - mean).square().sum() / double(n - 1);
    const double sd = s.std[j];
    CAPTURE(j);
    CHECK(std::abs(mean - s.mean[j]) <= 4.0 * sd / std::sqrt(double(n)) + 1e-6);
    CHECK(std::abs(var - sd * sd) <= 4.0 * std::sqrt(2.0 / double(n - 1)) * sd * sd + 1e-6);
  }
}

TEST_CASE("prior draws are deterministic per seed") {
  const KernelSpec k = KernelSpec::isotropic(0.1);
  const Points grid = unit_grid(101);
  CHECK(sample_prior_function(k, grid, 4) == sample_prior_function(k, grid, 4));
  CHECK(sample_prior_function(k, grid, 4) != sample_prior_function(k, grid, 5));
}

TEST_CASE("U estimate") {
  SUBCASE("zero output scale gives U = 0") {
    KernelSpec k = KernelSpec::isotropic(0.1, 0.0, 0.3);
    const UEstimate u = estimate_U(k, unit_grid(101), 200, 1);
    CHECK(u.value == 0.0);
    CHECK(u.std_error == 0.0);
  }
  SUBCASE("single point: U = 0 in expectation") {
    const KernelSpec k = KernelSpec::isotropic(0.1);
    const UEstimate u = estimate_U(k, unit_grid(1), 4000, 2);
    CHECK(std::abs(u.value) <= 4.0 * u.std_error);
  }
  SUBCASE("two independent points: E[max] = 1 / sqrt(pi)") {
    // Far apart relative to the lengthscale, so effectively independent.
    const KernelSpec k = KernelSpec::isotropic(1e-3);
    const UEstimate u = estimate_U(k, unit_grid(2), 40000, 3);
    CHECK(std::abs(u.value - 1.0 / std::sqrt(M_PI)) <= 4.0 * u.std_error);
  }
  CHECK_THROWS_AS(estimate_U(KernelSpec{}, unit_grid(10), 10, 1), InvalidArgument);
}

TEST_CASE("unit grid") {
  const Points g = unit_grid(5);
  CHECK(g(0, 0) == 0.0);
  CHECK(g(4, 0) == 1.0);
  CHECK(unit_grid(1)(0, 0) == 0.5);
  CHECK_THROWS_AS(unit_grid(0), InvalidArgument);
}

TEST_CASE("profiled NLL gradient matches finite differences") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u;
  for (bool ard : {false, true}) {
    Points x(12, 2);
    Eigen::VectorXd y(12);
    for (Eigen::Index i = 0; i < 12; ++i) {
      x.row(i) << u(rng), u(rng);
      y[i] = std::sin(5.0 * x(i, 0)) * std::cos(3.0 * x(i, 1));
    }
    const Dataset data(x, y);
    KernelSpec k;
    k.lengthscales = ard ? std::vector<double>{0.3, 0.6} : std::vector<double>{0.4};
    k.output_scale = 0.7;
    Eigen::VectorXd grad;
    profiled_nll(data, k, nullptr, &grad);
    const double h = 1e-5;
    for (Eigen::Index p = 0; p < grad.size(); ++p) {
      KernelSpec plus = k;
      KernelSpec minus = k;
      if (p < static_cast<Eigen::Index>(k.lengthscales.size())) {
        plus.lengthscales[p] *= std::exp(h);
        minus.lengthscales[p] *= std::exp(-h);
      } else {
        plus.output_scale *= std::exp(h);
        minus.output_scale *= std::exp(-h);
      }
      const double fd = (profiled_nll(data, plus) - profiled_nll(data, minus)) / (2.0 * h);
      CAPTURE(ard);
      CAPTURE(p);
      CHECK(grad[p] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("profiled mean is the GLS estimate") {
  const Points x = points_1d({0.0, 0.5, 1.0});
  Eigen::VectorXd y(3);
  y << 2.0, 2.0, 2.0;
  double mean = 0.0;
  profiled_nll(Dataset(x, y), KernelSpec::isotropic(0.2), &mean);
  CHECK(mean == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("fitted lengthscales recover the generating one") {
  // Self-consistency: fit on prior draws from a known kernel.
  const KernelSpec truth = KernelSpec::isotropic(0.2, 1.0);
  const Points grid = unit_grid(401);
  std::vector<double> logs;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::VectorXd f = sample_prior_function(truth, grid, 100 + seed);
    Dataset data = Dataset::empty(1);
    for (Eigen::Index j = 0; j < grid.rows(); j += 10) data.append(row(grid, j), f[j]);
    const KernelSpec fit = fit_hyperparameters(data, FitOptions{}, seed);
    logs.push_back(std::log(fit.lengthscales[0] / 0.2));
  }
  std::sort(logs.begin(), logs.end());
  const double median = 0.5 * (logs[9] + logs[10]);
  CHECK(std::abs(median) <= std::log(1.5));
}

TEST_CASE("fit rejects too little data") {
  Dataset one(points_1d({0.5}), Eigen::VectorXd::Constant(1, 1.0));
  CHECK_THROWS_AS(fit_hyperparameters(one, FitOptions{}, 1), FitError);
}
