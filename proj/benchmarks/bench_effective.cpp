#include <benchmark/benchmark.h>

#include "pvk/effective.hpp"

namespace {

struct Setup {
    pvk::ExternalPotential v{pvk::RadialFunction::even_polynomial({0.0, 0.5, 0.25})};
    pvk::RadialFunction w = pvk::RadialFunction::gaussian(1.0, 1.0);
    pvk::RadialGrid grid = pvk::RadialGrid::gauss_legendre(6.5, 20, 8);
    pvk::EquilibriumProfile p = pvk::solve_mu_beta(v, w, 0.1, grid);
    pvk::EquilibriumClass cls = pvk::classify_equilibrium(p);
    pvk::RenormalizedPotential wb = pvk::renormalized_potential(p);
};

const Setup& setup() {
    static const Setup s;
    return s;
}

void BM_MeanField(benchmark::State& state) {
    const auto& s = setup();
    for (auto _ : state) benchmark::DoNotOptimize(pvk::solve_mu_beta(s.v, s.w, 0.1, s.grid));
}
BENCHMARK(BM_MeanField)->Unit(benchmark::kMillisecond);

void BM_ABetaSingleRadius(benchmark::State& state) {
    const auto& s = setup();
    for (auto _ : state) benchmark::DoNotOptimize(pvk::compute_a_beta(s.p, s.cls, s.wb, {1.0}));
}
BENCHMARK(BM_ABetaSingleRadius)->Unit(benchmark::kMillisecond);

void BM_FokkerPlanck(benchmark::State& state) {
    const auto& s = setup();
    std::vector<double> tau;
    for (int i = 0; i <= 100; ++i) tau.push_back(0.5 * i);
    auto a = [](double r) { return 0.1 * r * r; };
    auto f0 = [&](double r) { return s.p.mu_at(r); };
    for (auto _ : state) benchmark::DoNotOptimize(pvk::fp_evolve(f0, a, s.p, tau));
}
BENCHMARK(BM_FokkerPlanck)->Unit(benchmark::kMillisecond);

}  // namespace
