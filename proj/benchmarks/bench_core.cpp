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

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <random>

#include "costbo/acquisition.hpp"
#include "costbo/gp.hpp"
#include "costbo/stopping.hpp"

namespace {

using namespace costbo;

// Posterior on a 1D grid after `n` observations of a smooth function.
struct Fixture {
  std::shared_ptr<const Points> grid;
  ConditionedGp gp;
  PosteriorState state;

  Fixture(Eigen::Index grid_size, int n)
      : grid(std::make_shared<const Points>(unit_grid(grid_size))),
        gp(KernelSpec::isotropic(0.1), grid) {
    Dataset data = Dataset::empty(1);
    for (int i = 0; i < n; ++i) {
      const Eigen::Index j = (grid_size - 1) * (2 * i + 1) / (2 * n);
      const double y = std::sin(9.0 * (*grid)(j, 0));
      gp.add_candidate(j, y);
      data.append(row(*grid, j), y);
    }
    state = posterior(data, gp.kernel(), *grid);
  }
};

void BM_PbgiScores(benchmark::State& st) {
  const Fixture f(st.range(0), 10);
  const std::vector<double> costs(static_cast<std::size_t>(f.state.size()), 0.01);
  for (auto _ : st) benchmark::DoNotOptimize(pbgi(f.state, costs).best_index);
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_PbgiScores)->Arg(1001)->Arg(10001)->Unit(benchmark::kMillisecond);

void BM_LogEipcScores(benchmark::State& st) {
  const Fixture f(st.range(0), 10);
  const std::vector<double> costs(static_cast<std::size_t>(f.state.size()), 0.01);
  for (auto _ : st) benchmark::DoNotOptimize(log_eipc(f.state, costs).best_index);
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_LogEipcScores)->Arg(10001)->Unit(benchmark::kMillisecond);

void BM_PbgiIndex(benchmark::State& st) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (auto _ : st) {
    benchmark::DoNotOptimize(pbgi_index(u(rng), std::exp(u(rng)), std::exp(2.0 * u(rng))));
  }
}
BENCHMARK(BM_PbgiIndex);

// One rank-one conditioning step after `range(0)` observations, then the
// posterior mean and std over a 10001-point grid.
void BM_PosteriorUpdate(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  for (auto _ : st) {
    st.PauseTiming();
    Fixture f(10001, n);
    st.ResumeTiming();
    f.gp.add_candidate(17, 0.25);
    benchmark::DoNotOptimize(f.gp.mean());
    benchmark::DoNotOptimize(f.gp.std());
  }
}
BENCHMARK(BM_PosteriorUpdate)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PriorDraw(benchmark::State& st) {
  const PriorSampler sampler(KernelSpec::isotropic(0.1), unit_grid(st.range(0)));
  std::mt19937_64 rng(3);
  for (auto _ : st) benchmark::DoNotOptimize(sampler.draw_many(16, rng));
  st.SetItemsProcessed(st.iterations() * 16);
}
BENCHMARK(BM_PriorDraw)->Arg(2001)->Arg(10001)->Unit(benchmark::kMillisecond);

void BM_PriorDraw3d(benchmark::State& st) {
  Points pts(st.range(0), 3);
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) << u(g), u(g), u(g);
  const PriorSampler sampler(KernelSpec::isotropic(0.3), pts);
  std::mt19937_64 rng(3);
  for (auto _ : st) benchmark::DoNotOptimize(sampler.draw_many(16, rng));
  st.SetItemsProcessed(st.iterations() * 16);
}
BENCHMARK(BM_PriorDraw3d)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_PrbExceed(benchmark::State& st) {
  Fixture f(2001, 10);
  std::mt19937_64 rng(9);
  for (auto _ : st) benchmark::DoNotOptimize(prb_exceed_fraction(f.gp, 0.05, 1000, rng));
}
BENCHMARK(BM_PrbExceed)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
