#include <benchmark/benchmark.h>

#include "gnls/branching.hpp"
#include "gnls/floquet.hpp"
#include "gnls/sections.hpp"
#include "gnls/seed.hpp"

namespace {

const gnls::OrbitSolution& gamma_star() {
    static const gnls::OrbitSolution o = gnls::seed_rstar_orbit(gnls::Params{}, 1.0261, -3.4592, 0.0);
    return o;
}

void BM_VectorField(benchmark::State& st) {
    const gnls::Params p;
    gnls::State4 u(0.3, -0.2, 0.7, 0.1);
    for (auto _ : st) {
        u += 1e-12 * gnls::vector_field(u, p);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_VectorField);

void BM_NewtonFixEnergy(benchmark::State& st) {
    const gnls::OrbitSolution& o = gamma_star();
    gnls::OrbitSolution start = o;
    start.values *= 1.001;
    for (auto _ : st) benchmark::DoNotOptimize(gnls::newton_solve(start, gnls::Constraint::energy(0.0)));
}
BENCHMARK(BM_NewtonFixEnergy)->Unit(benchmark::kMillisecond);

void BM_Floquet(benchmark::State& st) {
    const gnls::OrbitSolution& o = gamma_star();
    for (auto _ : st) benchmark::DoNotOptimize(gnls::floquet(o));
}
BENCHMARK(BM_Floquet)->Unit(benchmark::kMillisecond);

void BM_MonodromyCollocation(benchmark::State& st) {
    const gnls::OrbitSolution& o = gamma_star();
    for (auto _ : st) benchmark::DoNotOptimize(gnls::monodromy_collocation(o));
}
BENCHMARK(BM_MonodromyCollocation)->Unit(benchmark::kMillisecond);

void BM_SigmaIntersections(benchmark::State& st) {
    const gnls::OrbitSolution& o = gamma_star();
    for (auto _ : st) benchmark::DoNotOptimize(gnls::sigma_intersections(o));
}
BENCHMARK(BM_SigmaIntersections)->Unit(benchmark::kMicrosecond);

void BM_KCover(benchmark::State& st) {
    const gnls::OrbitSolution& o = gamma_star();
    const int k = int(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(gnls::k_cover(o, k));
}
BENCHMARK(BM_KCover)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_EnergyContinuation(benchmark::State& st) {
    const gnls::OrbitSolution& o = gamma_star();
    gnls::StepControl c;
    c.max_steps = 20;
    c.sections = false;
    for (auto _ : st) benchmark::DoNotOptimize(gnls::extend_branch(o, gnls::FamilyKind::EnergyFamily, c));
}
BENCHMARK(BM_EnergyContinuation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
