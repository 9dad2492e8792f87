#include <benchmark/benchmark.h>

#include <random>

#include "pvk/nbody.hpp"

namespace {

std::vector<pvk::Vec2> positions(int n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, pvk::kTwoPi);
    std::vector<pvk::Vec2> x(n);
    for (auto& p : x) p = {u(rng), u(rng)};
    return x;
}

const pvk::TorusKernel& kernel() {
    static const auto w = pvk::TorusKernel::from_cosines({{1, 0, 1.0}, {0, 1, 1.0}});
    return w;
}

void BM_TorusVelocity(benchmark::State& state) {
    const auto x = positions(static_cast<int>(state.range(0)));
    std::vector<pvk::Vec2> v;
    for (auto _ : state) {
        pvk::torus_velocity(kernel(), x, v);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TorusVelocity)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_TorusVelocityDirect(benchmark::State& state) {
    const auto x = positions(static_cast<int>(state.range(0)));
    std::vector<pvk::Vec2> v;
    for (auto _ : state) {
        pvk::torus_velocity_direct(kernel(), x, v);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TorusVelocityDirect)->RangeMultiplier(4)->Range(64, 1024)->Complexity();

void BM_Ensemble(benchmark::State& state) {
    pvk::EnsembleConfig cfg;
    cfg.n_particles = static_cast<int>(state.range(0));
    cfg.n_samples = 50;
    cfg.t_grid = {0.0, 1.0};
    cfg.single_modes = {{1, 0}};
    const auto f0 = pvk::TorusDensity::from_cosines({{1, 0, 0.5}});
    for (auto _ : state) benchmark::DoNotOptimize(pvk::run_ensemble(cfg, kernel(), f0));
}
BENCHMARK(BM_Ensemble)->Arg(32)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
