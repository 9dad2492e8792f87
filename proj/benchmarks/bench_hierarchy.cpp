#include <benchmark/benchmark.h>

#include "pvk/hierarchy.hpp"

namespace {

const pvk::TorusKernel& kernel() {
    static const auto w = pvk::TorusKernel::from_cosines({{1, 0, 1.0}, {0, 1, 1.0}});
    return w;
}

const pvk::TorusDensity& density() {
    static const auto f = pvk::TorusDensity::from_cosines({{1, 0, 0.4}, {0, 1, 0.2}, {1, 1, 0.2}});
    return f;
}

void BM_BuildOperator(benchmark::State& state) {
    const auto b = pvk::enumerate_basis(1, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pvk::build_operator(kernel(), b));
    state.counters["dim"] = static_cast<double>(b.size());
}
BENCHMARK(BM_BuildOperator)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_ApplyOperator(benchmark::State& state) {
    const auto b = pvk::enumerate_basis(1, static_cast<int>(state.range(0)));
    const auto op = pvk::build_operator(kernel(), b);
    const auto g = pvk::initial_state(density(), b);
    for (auto _ : state) benchmark::DoNotOptimize(op.apply(g));
    state.counters["dim"] = static_cast<double>(b.size());
}
BENCHMARK(BM_ApplyOperator)->DenseRange(3, 6);

void BM_LanczosEvolve(benchmark::State& state) {
    const auto b = pvk::enumerate_basis(1, static_cast<int>(state.range(0)));
    const auto op = pvk::build_operator(kernel(), b);
    const auto g = pvk::initial_state(density(), b);
    for (auto _ : state) benchmark::DoNotOptimize(pvk::evolve(op, g, {0.0, 0.5, 1.0, 2.0}));
}
BENCHMARK(BM_LanczosEvolve)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

}  // namespace
