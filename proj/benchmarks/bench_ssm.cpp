#include <benchmark/benchmark.h>

#include "gssm/ssm.hpp"
#include "gssm/systems.hpp"

using namespace gssm;

namespace {

void BM_ShawPierreSSM(benchmark::State& state) {
    const auto ns = make_system("shaw_pierre");
    const auto spec = spectral_analysis(ns.system, 2);
    SSMOptions o;
    o.order = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(compute_ssm(ns.system, spec, o));
}
BENCHMARK(BM_ShawPierreSSM)->Arg(5)->Arg(11)->Arg(17)->Unit(benchmark::kMillisecond);

void BM_DauchotGraph(benchmark::State& state) {
    const auto ns = make_system("dauchot_manneville");
    const auto spec = spectral_analysis(ns.system, 1);
    SSMOptions o;
    o.style = Style::graph;
    o.projection = Projection::coordinate;
    o.order = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(compute_ssm(ns.system, spec, o));
}
BENCHMARK(BM_DauchotGraph)->Arg(8)->Arg(24);

void BM_ResidualSweep(benchmark::State& state) {
    const auto ns = make_system("shaw_pierre");
    SSMOptions o;
    o.order = 11;
    const auto m = compute_ssm(ns.system, spectral_analysis(ns.system, 2), o);
    for (auto _ : state) benchmark::DoNotOptimize(residual_sweep(ns.system, m));
}
BENCHMARK(BM_ResidualSweep)->Unit(benchmark::kMillisecond);

}  // namespace
