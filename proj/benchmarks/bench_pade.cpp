#include <benchmark/benchmark.h>

#include "gssm/pade.hpp"
#include "gssm/systems.hpp"

using namespace gssm;

namespace {

void BM_PadeUnivariate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto s = euler_series(2 * n);
    for (auto _ : state) benchmark::DoNotOptimize(pade_univariate(s, n, n));
}
BENCHMARK(BM_PadeUnivariate)->Arg(3)->Arg(6)->Arg(10);

void BM_PadeBivariate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    MultiSeries s(2, 1, 2 * n);
    for (const auto& k : indices_up_to(2, 2 * n)) s.set(k, 0, 1.0 / (1.0 + k[0] + 2.0 * k[1]));
    for (auto _ : state) benchmark::DoNotOptimize(pade_multivariate(s, n, n));
}
BENCHMARK(BM_PadeBivariate)->Arg(2)->Arg(4)->Arg(5);

}  // namespace
