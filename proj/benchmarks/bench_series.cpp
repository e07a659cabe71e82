#include <benchmark/benchmark.h>

#include "gssm/series.hpp"

using namespace gssm;

namespace {

MultiSeries dense(int dim, int order, double seed) {
    MultiSeries s(dim, 1, order);
    double v = seed;
    for (const auto& k : indices_up_to(dim, order, 1)) {
        v = std::fmod(v * 1.37 + 0.11, 1.0);
        s.set(k, 0, cplx(v - 0.5, 0.25 * v));
    }
    return s;
}

void BM_Multiply(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    const auto a = dense(2, order, 0.3), b = dense(2, order, 0.7);
    for (auto _ : state) benchmark::DoNotOptimize(multiply_truncated(a, b, order));
    state.SetComplexityN(order);
}
BENCHMARK(BM_Multiply)->DenseRange(5, 25, 5);

void BM_Compose(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    const auto outer = dense(1, order, 0.4);
    const auto inner = dense(2, order, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(compose_truncated(outer, inner, order));
}
BENCHMARK(BM_Compose)->DenseRange(5, 15, 5);

void BM_Evaluate(benchmark::State& state) {
    const auto s = dense(2, static_cast<int>(state.range(0)), 0.2);
    const std::vector<cplx> p{cplx(0.3, 0.1), cplx(0.3, -0.1)};
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(s, std::span<const cplx>(p)));
}
BENCHMARK(BM_Evaluate)->Arg(11)->Arg(21);

}  // namespace
