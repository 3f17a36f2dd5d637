#include <benchmark/benchmark.h>

#include "pmelab/entropy.hpp"
#include "pmelab/geometry.hpp"
#include "pmelab/harnack.hpp"
#include "pmelab/operators.hpp"
#include "pmelab/solver.hpp"

namespace {

pmelab::GeometryPtr grid(int dim, int n) {
  return pmelab::build_torus(dim, std::vector<int>(dim, n), std::vector<double>(dim, 1.0));
}

pmelab::ScalarField data(const pmelab::GeometryPtr& g) {
  return g->sample(pmelab::SmoothFunction::sine(1.0, 0.5, {1, 1, 0}));
}

void BM_Laplacian(benchmark::State& state) {
  auto g = grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  auto f = data(g);
  for (auto _ : state) benchmark::DoNotOptimize(pmelab::laplacian(f));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(g->size()));
}
BENCHMARK(BM_Laplacian)->Args({1, 256})->Args({2, 64})->Args({2, 256})->Args({3, 32});

void BM_Hessian(benchmark::State& state) {
  auto g = grid(2, static_cast<int>(state.range(0)));
  auto f = data(g);
  for (auto _ : state) benchmark::DoNotOptimize(pmelab::hessian(f));
}
BENCHMARK(BM_Hessian)->Arg(64)->Arg(256);

void BM_ExplicitStep(benchmark::State& state) {
  auto g = grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  auto s = pmelab::make_state(data(g), 2.0);
  const double dt = pmelab::stable_time_step(s);
  for (auto _ : state) benchmark::DoNotOptimize(pmelab::step(s, dt));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(g->size()));
}
BENCHMARK(BM_ExplicitStep)->Args({1, 256})->Args({1, 512})->Args({2, 64});

void BM_SemiImplicitStep(benchmark::State& state) {
  auto g = grid(1, static_cast<int>(state.range(0)));
  auto s = pmelab::make_state(data(g), 2.0);
  pmelab::StepOptions opt;
  opt.scheme = pmelab::Scheme::semi_implicit;
  const double dt = 10 * pmelab::stable_time_step(s);
  for (auto _ : state) benchmark::DoNotOptimize(pmelab::step(s, dt, opt));
}
BENCHMARK(BM_SemiImplicitStep)->Arg(256)->Arg(512);

void BM_Dissipation(benchmark::State& state) {
  auto g = grid(1, static_cast<int>(state.range(0)));
  auto s = pmelab::make_state(data(g), 2.0, 0.1);
  auto sched = pmelab::make_schedule(2.0, 1.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(pmelab::dissipation(s, sched, 0.25));
}
BENCHMARK(BM_Dissipation)->Arg(256)->Arg(512);

void BM_AlphaPhiCustom(benchmark::State& state) {
  auto fam = pmelab::SigmaFamily::custom([](double t) { return t * t; }, [](double t) { return 2 * t; }, 1.0, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(pmelab::alpha_phi(fam, 0.5, 1.0));
}
BENCHMARK(BM_AlphaPhiCustom);

}  // namespace
BENCHMARK_MAIN();
