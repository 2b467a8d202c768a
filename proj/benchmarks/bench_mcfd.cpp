#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mcfd/american.hpp"
#include "mcfd/compact_operators.hpp"
#include "mcfd/jump_integral.hpp"
#include "mcfd/time_stepper.hpp"
#include "mcfd/toeplitz.hpp"
#include "mcfd/tridiagonal.hpp"

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

// Toeplitz matrix-vector product of size n: FFT embedding against the direct sum.
void BM_ToeplitzFft(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto offsets = random_vector(2 * n - 1, 1);
    const auto v = random_vector(n, 2);
    mcfd::ToeplitzConvolver conv(offsets);
    mcfd::ToeplitzConvolver::Workspace ws(conv);
    std::vector<double> y(n);
    for (auto _ : state) {
        conv.multiply(v, y, ws);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ToeplitzFft)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNLogN);

void BM_ToeplitzDirect(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto offsets = random_vector(2 * n - 1, 1);
    const auto v = random_vector(n, 2);
    for (auto _ : state) {
        auto y = mcfd::toeplitz_multiply_direct(offsets, v);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ToeplitzDirect)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_TridiagonalSolve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    mcfd::TridiagonalSystem sys;
    sys.sub = random_vector(n, 3);
    sys.super = random_vector(n, 4);
    sys.diag.assign(n, 4.0);
    sys.rhs = random_vector(n, 5);
    for (auto _ : state) {
        auto x = mcfd::solve_tridiagonal(sys);
        benchmark::DoNotOptimize(x.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TridiagonalSolve)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_CompactFirstDerivative(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const mcfd::GridSpec g(2.0, N, 10, 0.25);
    mcfd::GridFunction u(g.node_count());
    const auto v = random_vector(g.node_count(), 6);
    for (std::size_t i = 0; i < v.size(); ++i) u[i] = v[i];
    for (auto _ : state) {
        auto ux = mcfd::compact_first_derivative(u, g);
        benchmark::DoNotOptimize(ux.values().data());
    }
}
BENCHMARK(BM_CompactFirstDerivative)->RangeMultiplier(4)->Range(64, 4096);

// Full European solve at the default mesh ratio.
void BM_EuropeanSolve(benchmark::State& state) {
    const mcfd::MarketParams p;
    const auto g = mcfd::GridSpec::from_mesh_ratio(2.0, static_cast<int>(state.range(0)), 0.4, p.T);
    mcfd::SolverConfig cfg;
    cfg.stored_slices = 0;
    for (auto _ : state) {
        auto s = mcfd::solve_european(p, g, cfg);
        benchmark::DoNotOptimize(s.price(100.0));
    }
    state.counters["M"] = g.M();
}
BENCHMARK(BM_EuropeanSolve)->Arg(96)->Arg(192)->Arg(384)->Unit(benchmark::kMillisecond);

void BM_AmericanSolve(benchmark::State& state) {
    const mcfd::MarketParams p;
    const auto g = mcfd::GridSpec::from_mesh_ratio(2.0, static_cast<int>(state.range(0)), 0.4, p.T);
    mcfd::SolverConfig cfg;
    cfg.stored_slices = 0;
    for (auto _ : state) {
        auto s = mcfd::solve_american(p, g, cfg);
        benchmark::DoNotOptimize(s.price(100.0));
    }
}
BENCHMARK(BM_AmericanSolve)->Arg(96)->Arg(192)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
