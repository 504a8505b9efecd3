#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "vortexlab/euler.hpp"
#include "vortexlab/green.hpp"
#include "vortexlab/kirchhoff_routh.hpp"
#include "vortexlab/rearrangement.hpp"

using namespace vortexlab;

namespace {

const PoissonSolver& disk(int n) {
    static std::map<int, std::unique_ptr<PoissonSolver>> cache;
    auto& s = cache[n];
    if (!s) s = std::make_unique<PoissonSolver>(Grid::build(DomainSpec::unit_disk(), n));
    return *s;
}

ScalarField pair_field(const PoissonSolver& s, double eps) {
    RearrangementSpec spec;
    spec.eps1 = spec.eps2 = eps;
    const Prototype proto = make_prototype(spec, s.grid());
    return place_prototype(s.grid_ptr(), proto, {0.3, 0.0}, {-0.3, 0.0});
}

}  // namespace

static void Factorize(benchmark::State& state) {
    const GridPtr g = Grid::build(DomainSpec::unit_disk(), static_cast<int>(state.range(0)));
    for (auto _ : state) {
        PoissonSolver s(g);
        benchmark::DoNotOptimize(s);
    }
    state.SetComplexityN(static_cast<benchmark::IterationCount>(g->size()));
}
BENCHMARK(Factorize)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond)->Complexity();

static void PoissonSolve(benchmark::State& state) {
    const PoissonSolver& s = disk(static_cast<int>(state.range(0)));
    const ScalarField rhs = pair_field(s, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(s.solve(rhs));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(s.grid().size()));
}
BENCHMARK(PoissonSolve)->Arg(64)->Arg(128)->Arg(256)->Arg(384)->Unit(benchmark::kMillisecond)->Complexity();

static void BestResponse(benchmark::State& state) {
    const PoissonSolver& s = disk(static_cast<int>(state.range(0)));
    RearrangementSpec spec;
    const Prototype proto = make_prototype(spec, s.grid());
    const ScalarField psi = s.solve(pair_field(s, 0.1));
    for (auto _ : state) benchmark::DoNotOptimize(best_response(psi, proto));
}
BENCHMARK(BestResponse)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void KirchhoffRouthValue(benchmark::State& state) {
    const KirchhoffRouth kr(disk(128));
    const KRConfiguration cfg{{{0.3, 0.1}, {-0.2, -0.35}}, {1.0, -1.0}};
    kr.value(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(kr.value(cfg));
}
BENCHMARK(KirchhoffRouthValue);

static void KirchhoffRouthGradient(benchmark::State& state) {
    const KirchhoffRouth kr(disk(128));
    const KRConfiguration cfg{{{0.3, 0.1}, {-0.2, -0.35}}, {1.0, -1.0}};
    kr.gradient(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(kr.gradient(cfg));
}
BENCHMARK(KirchhoffRouthGradient);

static void EulerStep(benchmark::State& state) {
    const PoissonSolver& s = disk(static_cast<int>(state.range(0)));
    const EulerState start{0.0, pair_field(s, 0.1)};
    const double dt = max_stable_dt(s, start.omega);
    for (auto _ : state) benchmark::DoNotOptimize(step(s, start, dt));
}
BENCHMARK(EulerStep)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
