#include <benchmark/benchmark.h>

#include "mobhoro/arith.hpp"
#include "mobhoro/criterion.hpp"
#include "mobhoro/decomp.hpp"
#include "mobhoro/modular.hpp"
#include "mobhoro/observable.hpp"
#include "mobhoro/orbit.hpp"
#include "mobhoro/symbolic.hpp"

using namespace mobhoro;

namespace {

void BM_SieveMobius(benchmark::State& state)
{
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sieve_mobius(n));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SieveMobius)->RangeMultiplier(10)->Range(10000, 10000000)->Unit(benchmark::kMillisecond);

void BM_SievePrimes(benchmark::State& state)
{
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sieve_primes(n));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SievePrimes)->RangeMultiplier(10)->Range(10000, 10000000)->Unit(benchmark::kMillisecond);

void BM_BuildDecomposition(benchmark::State& state)
{
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const auto params = DecompositionParams::make(n, 0.3, 9, 30);
    const auto primes = sieve_primes(n);
    for (auto _ : state) benchmark::DoNotOptimize(build_decomposition(params, primes));
}
BENCHMARK(BM_BuildDecomposition)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_Reduce(benchmark::State& state)
{
    double x = 0.1234, y = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reduce(x, y));
        x += 0.618;
    }
}
BENCHMARK(BM_Reduce);

// Cost per orbit point grows with the working precision needed at large n.
void BM_OrbitEvaluation(benchmark::State& state)
{
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const auto xi = ModularPoint::parse("cusp:z=e");
    const OrbitEvaluator eval(xi, n);
    std::uint64_t k = n / 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval(k));
        if (++k > n) k = n / 2;
    }
    state.counters["bits"] = eval.precision_bits();
}
BENCHMARK(BM_OrbitEvaluation)->RangeMultiplier(100)->Range(100, 100000000);

void BM_BirkhoffAverage(benchmark::State& state)
{
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const auto xi = ModularPoint::parse("cusp:z=e");
    const auto f = Observable::bump(2.0, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(birkhoff_average(f, xi, n));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BirkhoffAverage)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_BilinearSum(benchmark::State& state)
{
    const auto m = static_cast<std::uint64_t>(state.range(0));
    const auto f = exponential_sequence(SymbolicReal::sqrt_of(2), 47 * m);
    for (auto _ : state) benchmark::DoNotOptimize(bilinear_sum(f, 43, 47, m));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BilinearSum)->RangeMultiplier(10)->Range(1000, 1000000);

void BM_TauEstimate(benchmark::State& state)
{
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const auto f = exponential_sequence(SymbolicReal::sqrt_of(2), n);
    for (auto _ : state) benchmark::DoNotOptimize(tau_estimate(f, 50.0, CorrelationLength::scaled(n)));
}
BENCHMARK(BM_TauEstimate)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_CriterionLedger(benchmark::State& state)
{
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const auto params = DecompositionParams::make(n, 0.3, 9, 30);
    const auto primes = sieve_primes(n);
    const auto mu = sieve_mobius(n);
    const auto f = exponential_sequence(SymbolicReal::sqrt_of(2), required_horizon(params, primes));
    CriterionInput in{n, 0.3, 9, 30, 50.0, {}, {}};
    for (auto _ : state) benchmark::DoNotOptimize(criterion_ledger(mu, f, in, primes));
}
BENCHMARK(BM_CriterionLedger)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_HaarMean(benchmark::State& state)
{
    QuadratureSpec q;
    q.nx = q.ns = static_cast<int>(state.range(0));
    const auto f = Observable::bump(2.0, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(haar_mean(f, q));
}
BENCHMARK(BM_HaarMean)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
