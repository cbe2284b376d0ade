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
#include <limits>
#include <numbers>
#include <random>

#include "costbo/acquisition.hpp"
#include "costbo/error.hpp"
#include "costbo/normal.hpp"

using namespace costbo;

namespace {

PosteriorState make_state(std::vector<double> mean, std::vector<double> sd,
                          std::vector<std::uint8_t> evaluated, double incumbent) {
  PosteriorState s;
  const auto m = static_cast<Eigen::Index>(mean.size());
  s.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), m);
  s.std = Eigen::Map<Eigen::VectorXd>(sd.data(), m);
  s.evaluated = std::move(evaluated);
  s.observed = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index j = 0; j < m; ++j) {
    if (s.is_evaluated(j)) s.observed[j] = s.mean[j];
  }
  s.incumbent = incumbent;
  return s;
}

}  // namespace

TEST_CASE("EI closed form agrees with 1e7-draw Monte Carlo within 4 SE") {
  struct Case {
    double mu, sigma, y;
  };
  const Case cases[] = {{0.0, 1.0, 0.0}, {0.3, 0.5, -0.2}, {-1.0, 2.0, 0.5}};
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  for (const Case& c : cases) {
    const int n = 10'000'000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double imp = std::max(c.y - (c.mu + c.sigma * z(rng)), 0.0);
      sum += imp;
      sum_sq += imp * imp;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
    CAPTURE(c.mu);
    CHECK(std::abs(ei(c.mu, c.sigma, c.y) - mean) <= 4.0 * se);
  }
}

TEST_CASE("EI special cases") {
  CHECK(ei(0.0, 1.0, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(ei(1.0, 0.0, 3.0) == 2.0);
  CHECK(ei(3.0, 0.0, 1.0) == 0.0);
  CHECK(log_ei(3.0, 0.0, 1.0) == -INFINITY);
  CHECK(ei(0.0, 1e-300, 0.0) >= 0.0);
}

TEST_CASE("log EI stays finite where EI underflows") {
  CHECK(log_ei(0.0, 1.0, 0.0) == doctest::Approx(std::log(0.3989422804014327)).epsilon(1e-14));
  // z = (y - mu) / sigma = -1000
  CHECK(log_ei(1000.0, 1.0, 0.0) == doctest::Approx(-500014.73445209116).epsilon(1e-12));
  CHECK(ei(1000.0, 1.0, 0.0) == 0.0);
  const double two = log_ei(60.0, 2.0, 0.0);  // z = -30, sigma 2
  CHECK(two == doctest::Approx(std::log(2.0) - 457.72465376059800).epsilon(1e-12));
  // Monotone in the incumbent across the branch switch.
  double prev = -INFINITY;
  for (double y = -50.0; y <= 0.0; y += 0.5) {
    const double v = log_ei(0.0, 1.0, y);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("PBGI root accuracy on random triples") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> mu(0.0, 2.0);
  std::uniform_real_distribution<double> log_sigma(std::log(1e-3), std::log(10.0));
  std::uniform_real_distribution<double> log_cost(std::log(1e-6), std::log(10.0));
  for (int i = 0; i < 1000; ++i) {
    const double m = mu(rng);
    const double s = std::exp(log_sigma(rng));
    const double c = std::exp(log_cost(rng));
    int iters = 0;
    const double g = pbgi_index(m, s, c, std::nullopt, kPbgiBisectionIterations, &iters);
    CAPTURE(m);
    CAPTURE(s);
    CAPTURE(c);
    CHECK(iters <= kPbgiBisectionIterations);
    CHECK(std::abs(ei(m, s, g) - c) <= 1e-9 * std::max(1.0, c));
  }
}

TEST_CASE("PBGI index properties") {
  SUBCASE("zero variance gives mu + c") {
    CHECK(pbgi_index(0.7, 0.0, 0.25) == doctest::Approx(0.95));
  }
  SUBCASE("increasing in cost") {
    double prev = -INFINITY;
    for (double c : {1e-4, 1e-3, 1e-2, 0.1, 1.0}) {
      const double g = pbgi_index(0.0, 1.0, c);
      CHECK(g > prev);
      prev = g;
    }
  }
  SUBCASE("pivot comparison is exact") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 500; ++i) {
      const double m = u(rng);
      const double s = std::exp(u(rng));
      const double pivot = u(rng);
      // Cost exactly at the EI of the pivot is the hardest case.
      const double c = i % 2 ? ei(m, s, pivot) : std::exp(u(rng));
      if (!(c > 0.0)) continue;
      const double g = pbgi_index(m, s, c, pivot);
      CHECK((g >= pivot) == (ei(m, s, pivot) <= c));
    }
  }
  CHECK_THROWS_AS(pbgi_index(0.0, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(pbgi_index(0.0, -1.0, 1.0), InvalidArgument);
}

TEST_CASE("PBGI scores over a state") {
  const PosteriorState s = make_state({0.0, 0.5, -0.3}, {1.0, 0.2, 1e-4}, {0, 0, 1}, -0.3);
  const std::vector<double> costs{0.1, 0.1, 0.1};
  const AcquisitionScore a = pbgi(s, costs);
  CHECK(a.values[2] == -0.3);
  REQUIRE(a.best_index);
  CHECK(*a.best_index == 0);
  CHECK(a.best_value == a.values[0]);
}

TEST_CASE("LogEIPC picks the largest ratio, lowest index on ties") {
  const PosteriorState s = make_state({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {0, 0, 0}, 0.0);
  const std::vector<double> costs{2.0, 1.0, 1.0};
  const AcquisitionScore a = log_eipc(s, costs);
  REQUIRE(a.best_index);
  CHECK(*a.best_index == 1);
  CHECK(a.values[0] == doctest::Approx(std::log(0.3989422804014327 / 2.0)));
  const PosteriorState done = make_state({0.0}, {0.0}, {1}, 0.0);
  CHECK_FALSE(log_eipc(done, std::vector<double>{1.0}).best_index);
}

TEST_CASE("PBGI-D halves lambda only when the rule triggers") {
  PbgiDState st = PbgiDState::start(0.8);
  st = pbgi_d_step(st, false);
  CHECK(st.lambda_current == 0.8);
  st = pbgi_d_step(st, true);
  CHECK(st.lambda_current == 0.4);
  st = pbgi_d_step(st, true);
  CHECK(st.lambda_current == 0.2);
  CHECK(st.halvings == 2);
  CHECK(st.lambda0 == 0.8);
}

TEST_CASE("UCB confidence schedule") {
  // 2 log(d t^2 pi^2 / (6 delta)) at d = 1, t = 1, delta = 0.1.
  CHECK(ucb_beta(1, 1, 0.1) == doctest::Approx(5.600570790929582).epsilon(1e-14));
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(ucb_beta(7, 3, 0.05) ==
        doctest::Approx(2.0 * std::log(3.0 * 49.0 * pi2 / (6.0 * 0.05))).epsilon(1e-14));
  const PosteriorState s = make_state({0.0, 1.0}, {1.0, 2.0}, {0, 0}, INFINITY);
  const AcquisitionScore l = lcb(s, 1, 1, 0.1);
  const double w = std::sqrt(5.600570790929582) / kConfidenceScaleDown;
  CHECK(l.values[0] == doctest::Approx(-w));
  CHECK(l.values[1] == doctest::Approx(1.0 - 2.0 * w));
}

TEST_CASE("Thompson sampling is seeded and skips evaluated points") {
  const KernelSpec k = KernelSpec::isotropic(0.2);
  const Points cand = unit_grid(30);
  Dataset data = Dataset::empty(1);
  data.append(row(cand, 3), 0.5);
  data.append(row(cand, 20), -0.5);
  const AcquisitionScore a = thompson(data, k, cand, 9);
  const AcquisitionScore b = thompson(data, k, cand, 9);
  REQUIRE(a.best_index);
  CHECK(*a.best_index == *b.best_index);
  CHECK(*a.best_index != 3);
  CHECK(*a.best_index != 20);

  auto shared = std::make_shared<const Points>(cand);
  ConditionedGp gp(k, shared);
  std::vector<std::uint8_t> evaluated(30, 1);
  evaluated[11] = 0;
  for (Eigen::Index j = 0; j < 30; ++j) {
    if (j != 11) gp.add_candidate(j, 0.0);
  }
  CHECK(*thompson(gp, evaluated, 1).best_index == 11);
}

TEST_CASE("acquisition names round-trip") {
  for (AcquisitionKind k : {AcquisitionKind::LogEipc, AcquisitionKind::Pbgi, AcquisitionKind::PbgiD,
                            AcquisitionKind::Lcb, AcquisitionKind::Thompson}) {
    CHECK(parse_acquisition(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_acquisition("ei"), InvalidArgument);
}
