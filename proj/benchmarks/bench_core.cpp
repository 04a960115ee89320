#include <random>

#include <benchmark/benchmark.h>

#include "simcov/matrix.hpp"
#include "simcov/similarity.hpp"
#include "simcov/simulation.hpp"

using namespace simcov;

namespace {

SymMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) m.set(i, j, z(rng));
    }
    return m;
}

ReturnPanel study_panel(std::size_t days) {
    auto spec = ScenarioSpec::preset(2);
    spec.horizon = days;
    return simulate_returns(spec, 1);
}

void BM_Eigenvalues(benchmark::State& state, EigenMethod method) {
    const auto m = random_symmetric(std::size_t(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(sym_eigenvalues(m, method));
}
BENCHMARK_CAPTURE(BM_Eigenvalues, jacobi, EigenMethod::jacobi)->Arg(16)->Arg(100)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Eigenvalues, tridiagonal_qr, EigenMethod::tridiagonal_qr)
    ->Arg(16)
    ->Arg(100)
    ->Unit(benchmark::kMicrosecond);

void BM_ProbeBuild(benchmark::State& state) {
    const auto panel = study_panel(std::size_t(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ProbeSeries::build(panel, 50));
}
BENCHMARK(BM_ProbeBuild)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SimilarityProfile(benchmark::State& state) {
    const auto panel = study_panel(1000);
    const auto probes = ProbeSeries::build(panel, 50);
    const auto horizon = std::size_t(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(similarity_profile(probes, probes.last_time(), horizon, probes.dim()));
    }
}
BENCHMARK(BM_SimilarityProfile)->Arg(300)->Arg(900)->Unit(benchmark::kMillisecond);

void BM_WeightedCovariance(benchmark::State& state) {
    const auto panel = study_panel(1000);
    const auto probes = ProbeSeries::build(panel, 50);
    const auto w = weight_scheme(similarity_profile(probes, probes.last_time(), 900, probes.dim()));
    for (auto _ : state) benchmark::DoNotOptimize(weighted_covariance(probes, w));
}
BENCHMARK(BM_WeightedCovariance)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
