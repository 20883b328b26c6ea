#include <benchmark/benchmark.h>

#include "ddgame/ev_market.hpp"
#include "ddgame/learn.hpp"
#include "ddgame/pipeline.hpp"
#include "ddgame/solver.hpp"
#include "ddgame/wasserstein.hpp"

namespace {

using namespace ddgame;

MarketParams bench_market(int n) {
  MarketConfig mc;
  mc.n = n;
  return make_market(mc, 7);
}

void bm_weighted_projection(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BoxSet box = BoxSet::cube(n, 0.0, 1.0);
  const PlayerLayout layout = PlayerLayout::uniform(n);
  const StepWeights weights = StepWeights::uniform(n, 2.0);
  Rng rng(1);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(project_weighted(x, box, weights, layout));
}

void bm_expected_gradient(benchmark::State& state) {
  const MarketParams mkt = bench_market(static_cast<int>(state.range(0)));
  const Eigen::VectorXd x =
      0.5 * (mkt.feasible_box().lo + mkt.feasible_box().hi);
  for (auto _ : state)
    benchmark::DoNotOptimize(expected_gradient(mkt, x, mkt.b));
}

void bm_stochastic_step(benchmark::State& state) {
  const MarketParams mkt = bench_market(static_cast<int>(state.range(0)));
  const BoxSet box = mkt.feasible_box();
  const GradientFeed feed = make_stochastic_feed(mkt, mkt.b, 1);
  Rng rng(3);
  Eigen::VectorXd x = 0.5 * (box.lo + box.hi);
  for (auto _ : state) {
    const Eigen::VectorXd g = feed.sample(x, 0, rng);
    x = step_uniform(x, g, 200.0, box);
    benchmark::DoNotOptimize(x);
  }
}

void bm_wasserstein(benchmark::State& state) {
  const long m = state.range(0);
  Rng rng(5);
  std::vector<double> a(m), b(m + m / 3);
  for (double& v : a) v = rng.normal();
  for (double& v : b) v = rng.normal(0.3, 1.1);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein1_1d(a, b));
}

void bm_least_squares_fit(benchmark::State& state) {
  const MarketParams mkt = bench_market(6);
  Rng rng(9);
  const UniformBoxSampler sampler{BoxSet::cube(6, -2.0, 2.0)};
  const Dataset data =
      collect_dataset(mkt.true_map(), sampler, state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(fit_least_squares(data));
}

BENCHMARK(bm_weighted_projection)->Arg(6)->Arg(64)->Arg(512);
BENCHMARK(bm_expected_gradient)->Arg(6)->Arg(12);
BENCHMARK(bm_stochastic_step)->Arg(6)->Arg(12);
BENCHMARK(bm_wasserstein)->Arg(1000)->Arg(10000);
BENCHMARK(bm_least_squares_fit)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
