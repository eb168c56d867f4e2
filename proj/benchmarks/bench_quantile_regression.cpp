#include <benchmark/benchmark.h>

#include "garchqr/quantile_regression.hpp"
#include "garchqr/rng.hpp"

namespace {

garchqr::QrProblem make_problem(std::size_t n, std::size_t d, double tau) {
    garchqr::RngStream rng(7);
    garchqr::QrProblem p;
    p.tau = tau;
    p.design = garchqr::Matrix(n, d, 0.0);
    p.responses.resize(n);
    p.weights.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        p.design(t, 0) = 1.0;
        for (std::size_t k = 1; k < d; ++k) p.design(t, k) = rng.next_normal();
        p.responses[t] = 2.0 * rng.next_normal();
        p.weights[t] = 0.2 + rng.next_double();
    }
    return p;
}

void BM_QuantileRegression(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    const auto problem = make_problem(n, d, 0.05);
    for (auto _ : state) {
        auto sol = garchqr::solve_quantile_regression(problem);
        benchmark::DoNotOptimize(sol.objective);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

} // namespace

BENCHMARK(BM_QuantileRegression)
    ->Args({500, 3})
    ->Args({1000, 3})
    ->Args({2000, 3})
    ->Args({1000, 18})   // sieve-sized design
    ->Args({2000, 22});
