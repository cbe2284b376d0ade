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
#include <numbers>
#include <vector>

#include "costbo/costs.hpp"
#include "costbo/error.hpp"

using namespace costbo;

TEST_CASE("bessel_i0 against mpmath and the standard library") {
  struct Case {
    double x;
    double expected;
  };
  // mpmath.besseli(0, x) at 40 digits.
  const Case cases[] = {
      {0.5, 1.0634833707413235},  {1.0, 1.2660658777520083},  {2.0, 2.2795853023360673},
      {3.0, 4.8807925858650241},  {7.5, 268.16131151518936},  {15.0, 339649.37329791388},
      {16.0, 893446.22792010502}, {30.0, 781672297823.97749}, {100.0, 1.0737517071310738e+42},
  };
  for (const Case& c : cases) {
    CAPTURE(c.x);
    CHECK(bessel_i0(c.x) == doctest::Approx(c.expected).epsilon(1e-13));
    CHECK(bessel_i0(-c.x) == bessel_i0(c.x));
  }
  CHECK(bessel_i0(0.0) == 1.0);
  for (double x = 0.1; x < 40.0; x += 0.37) {
    CAPTURE(x);
    CHECK(bessel_i0(x) == doctest::Approx(std::cyl_bessel_i(0.0, x)).epsilon(1e-12));
  }
}

TEST_CASE("synthetic cost functions") {
  const std::vector<double> zero{0.0};
  const std::vector<double> one{1.0};
  CHECK(uniform_cost(zero) == 1.0);
  CHECK(linear_cost(zero) == doctest::Approx(1.0 / 11.0));
  CHECK(linear_cost(one) == doctest::Approx(21.0 / 11.0));
  CHECK(linear_cost(std::vector<double>{0.2, 0.8}) == doctest::Approx(11.0 / 11.0));
  CHECK_THROWS_AS(linear_cost(std::vector<double>{}), InvalidArgument);

  SUBCASE("periodic extremes in 1D") {
    const std::vector<double> star{0.3};
    // exp(+-2) / I0(2) via mpmath.
    CHECK(periodic_cost(star, star) == doctest::Approx(3.2414036409861536).epsilon(1e-13));
    const std::vector<double> trough{0.3 + 0.25};
    CHECK(periodic_cost(trough, star) == doctest::Approx(0.05936837858093056).epsilon(1e-12));
  }
  SUBCASE("periodic cost averages to one over the unit cube") {
    const std::vector<double> star{0.41};
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::vector<double> x{(i + 0.5) / n};
      sum += periodic_cost(x, star);
    }
    CHECK(sum / n == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("periodic in 2D uses alpha / d per coordinate") {
    const std::vector<double> star{0.1, 0.7};
    const std::vector<double> x{0.35, 0.7};
    const double s = std::cos(2.0 * std::numbers::pi * 2.0 * 0.25) + 1.0;
    const double expected = std::exp(s) / std::pow(std::cyl_bessel_i(0.0, 1.0), 2.0);
    CHECK(periodic_cost(x, star) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(periodic_cost(x, std::vector<double>{0.1}), InvalidArgument);
  }
}

TEST_CASE("proxy cost regression") {
  const std::vector<double> f{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> r{2.5, 4.5, 6.5, 8.5};
  const LinearFit fit = proxy_cost_fit(f, r);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(0.5));
  CHECK(fit.r_squared == doctest::Approx(1.0));

  // Least squares by hand: slope 0.8, intercept 0.6, R^2 = 0.64 / 0.8.
  const LinearFit noisy = proxy_cost_fit(std::vector<double>{0.0, 1.0, 2.0},
                                         std::vector<double>{0.4, 1.8, 2.0});
  CHECK(noisy.slope == doctest::Approx(0.8));
  CHECK(noisy.intercept == doctest::Approx(0.6));
  CHECK(noisy.r_squared == doctest::Approx(1.28 / 1.52));

  CHECK_THROWS_AS(proxy_cost_fit(std::vector<double>{1.0}, std::vector<double>{1.0}),
                  InvalidArgument);
  CHECK_THROWS_AS(proxy_cost_fit(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}),
                  InvalidArgument);
  CHECK_THROWS_AS(proxy_cost_fit(f, std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("parameter and FLOPs proxies") {
  const std::vector<int> widths{2, 3, 1};
  CHECK(dense_param_count(widths) == 13.0);
  CHECK(dense_param_count(std::vector<int>{784, 256, 10}) == 784.0 * 256 + 256 + 256.0 * 10 + 10);
  CHECK_THROWS_AS(dense_param_count(std::vector<int>{5}), InvalidArgument);
  CHECK_THROWS_AS(dense_param_count(std::vector<int>{5, 0}), InvalidArgument);
  CHECK(parameter_proxy_cost(1000.0) == doctest::Approx(1.0));

  CHECK(flops_proxy("cifar10-valid")(10.0) == 410.0);
  CHECK(flops_proxy("cifar100")(10.0) == 570.0);
  CHECK(flops_proxy("ImageNet16-120")(10.0) == 1010.0);
  CHECK_THROWS_AS(flops_proxy("mnist"), InvalidArgument);
}

TEST_CASE("unknown-cost plug-in estimators") {
  LogCostPosterior post;
  post.mu_ln_c = Eigen::Vector2d(0.0, std::log(3.0));
  post.sigma_ln_c = Eigen::Vector2d(1.0, 0.0);
  const Eigen::VectorXd inv = unknown_cost_estimate(post, CostEstimator::Inv);
  const Eigen::VectorXd exp = unknown_cost_estimate(post, CostEstimator::Exp);
  CHECK(inv[0] == doctest::Approx(0.6065306597126334).epsilon(1e-12));
  CHECK(exp[0] == doctest::Approx(1.6487212707001282).epsilon(1e-12));
  CHECK(inv[1] == doctest::Approx(3.0));
  CHECK(exp[1] == doctest::Approx(3.0));
  CHECK((inv.array() <= exp.array()).all());

  post.sigma_ln_c = Eigen::Vector3d(1.0, 1.0, 1.0);
  CHECK_THROWS_AS(unknown_cost_estimate(post, CostEstimator::Inv), InvalidArgument);
}

TEST_CASE("log-cost GP recovers a smooth cost surface") {
  const Points cand = unit_grid(41);
  std::vector<Eigen::Index> obs;
  std::vector<double> raw;
  for (Eigen::Index j = 0; j < 41; j += 4) {
    obs.push_back(j);
    raw.push_back(linear_cost(row(cand, j)));
  }
  const LogCostPosterior post = fit_log_cost(cand, obs, raw, FitOptions{}, 3);
  REQUIRE(post.mu_ln_c.size() == 41);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    CHECK(std::exp(post.mu_ln_c[obs[i]]) == doctest::Approx(raw[i]).epsilon(1e-2));
  }
  CHECK(std::exp(post.mu_ln_c[2]) == doctest::Approx(linear_cost(row(cand, 2))).epsilon(5e-2));

  const LogCostPosterior empty = fit_log_cost(cand, {}, {}, FitOptions{}, 3);
  CHECK(empty.mu_ln_c.allFinite());
  CHECK((empty.sigma_ln_c.array() > 0.0).all());
}

TEST_CASE("budget to lambda") {
  CHECK(lambda_for_budget(2.0, 11.0, 1.0) == doctest::Approx(0.2));
  CHECK_THROWS_AS(lambda_for_budget(2.0, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(lambda_for_budget(0.0, 5.0, 1.0), InvalidArgument);
}

TEST_CASE("cost model scales by lambda once") {
  const Points cand = unit_grid(3);
  const CostModel lin = CostModel::linear(0.5);
  const Eigen::VectorXd raw = lin.raw_costs(cand);
  CHECK(raw[2] == doctest::Approx(21.0 / 11.0));
  const Eigen::VectorXd policy = lin.policy_costs(cand, raw, {}, FitOptions{}, 0);
  CHECK(policy[2] == doctest::Approx(0.5 * 21.0 / 11.0));
  CHECK(lin.with_lambda(0.25).lambda() == 0.25);
  CHECK(lin.lambda() == 0.5);
  CHECK(lin.known());

  const CostModel tab = CostModel::table(2.0, Eigen::Vector3d(1.0, 2.0, 3.0));
  CHECK(tab.raw_costs(cand)[1] == 2.0);
  CHECK_THROWS_AS(tab.raw_costs(unit_grid(4)), InvalidArgument);
  CHECK_THROWS_AS(CostModel::table(1.0, Eigen::Vector2d(1.0, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(CostModel::uniform(0.0), InvalidArgument);
  CHECK_THROWS_AS(lin.with_lambda(-1.0), InvalidArgument);

  const CostModel hidden = CostModel::log_gp(1.0, Eigen::Vector3d(1.0, 2.0, 3.0), CostEstimator::Inv);
  CHECK_FALSE(hidden.known());
  CHECK(hidden.kind() == CostKind::LogGp);

  for (CostKind k : {CostKind::Uniform, CostKind::Linear, CostKind::Periodic, CostKind::Table,
                     CostKind::LogGp}) {
    CHECK(parse_cost_kind(to_string(k)) == k);
  }
  CHECK(parse_cost_estimator("inv") == CostEstimator::Inv);
  CHECK_THROWS_AS(parse_cost_estimator("mean"), InvalidArgument);
}
