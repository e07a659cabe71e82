#include <cmath>

#include <benchmark/benchmark.h>

#include "gssm/datadriven.hpp"

using namespace gssm;

namespace {

RegressionProblem planted(int n, int N, int M) {
    RegressionProblem p;
    p.inputs.resize(n * n, 2);
    p.targets.resize(n * n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = -1.0 + 2.0 * i / (n - 1), b = -1.0 + 2.0 * j / (n - 1);
            const double q = 1.0 + 0.5 * a * a + b * b;
            p.inputs.row(i * n + j) << a, b;
            p.targets.row(i * n + j) << (b - 0.1 * a) / q, (-a - 0.2 * b + a * a * b) / q;
        }
    p.N = N;
    p.M = M;
    return p;
}

void BM_RationalFit(benchmark::State& state) {
    const auto p = planted(static_cast<int>(state.range(0)), 3, 2);
    for (auto _ : state) benchmark::DoNotOptimize(fit_rational_field(p));
}
BENCHMARK(BM_RationalFit)->Arg(15)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_PolynomialFit(benchmark::State& state) {
    const auto p = planted(30, 0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(fit_polynomial_field(p.inputs, p.targets, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PolynomialFit)->Arg(5)->Arg(11);

}  // namespace
