#include <benchmark/benchmark.h>

#include "garchqr/garch.hpp"
#include "garchqr/hybrid.hpp"
#include "garchqr/qmle.hpp"

namespace {

garchqr::GarchParams model2() {
    garchqr::GarchParams p;
    p.alpha0 = 0.1;
    p.alpha = {0.15};
    p.beta = {0.8};
    return p;
}

void BM_VolatilityPath(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const bool grad = state.range(1) != 0;
    const auto sim = garchqr::simulate_garch(model2(), garchqr::InnovationLaw::normal(), n, 500, 1);
    for (auto _ : state) {
        auto path = garchqr::volatility_path(model2(), sim.returns, grad);
        benchmark::DoNotOptimize(path.h.back());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_QmleFit(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto sim = garchqr::simulate_garch(model2(), garchqr::InnovationLaw::normal(), n, 500, 2);
    for (auto _ : state) {
        auto fit = garchqr::fit_qmle(sim.returns, 1, 1);
        benchmark::DoNotOptimize(fit.objective);
    }
}

void BM_HybridFit(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto sim = garchqr::simulate_garch(model2(), garchqr::InnovationLaw::normal(), n, 500, 3);
    for (auto _ : state) {
        auto fit = garchqr::fit_hybrid(sim.returns, 1, 1, 0.05, true);
        benchmark::DoNotOptimize(fit.next_q);
    }
}

} // namespace

BENCHMARK(BM_VolatilityPath)->Args({1000, 0})->Args({1000, 1})->Args({4000, 1});
BENCHMARK(BM_QmleFit)->Arg(500)->Arg(1000)->Arg(2000);
BENCHMARK(BM_HybridFit)->Arg(500)->Arg(1000)->Arg(2000);
