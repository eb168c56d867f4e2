#include <benchmark/benchmark.h>

#include "garchqr/bootstrap.hpp"
#include "garchqr/hybrid.hpp"

namespace {

void BM_BootstrapReplicate(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    garchqr::GarchParams p;
    p.alpha0 = 0.4;
    p.alpha = {0.4};
    p.beta = {0.4};
    const auto sim = garchqr::simulate_garch(p, garchqr::InnovationLaw::normal(), n, 500, 4);
    const auto fit = garchqr::fit_hybrid(sim.returns, 1, 1, 0.1, true);
    const auto w = garchqr::draw_weights(garchqr::WeightLaw{}, n, 9);
    for (auto _ : state) {
        auto rep = garchqr::make_replicate(fit, sim.returns, w, 6);
        benchmark::DoNotOptimize(rep.q_stat);
    }
}

void BM_Ensemble(benchmark::State& state) {
    const auto B = static_cast<std::size_t>(state.range(0));
    garchqr::GarchParams p;
    p.alpha0 = 0.4;
    p.alpha = {0.4};
    p.beta = {0.4};
    const auto sim = garchqr::simulate_garch(p, garchqr::InnovationLaw::normal(), 1000, 500, 5);
    const auto fit = garchqr::fit_hybrid(sim.returns, 1, 1, 0.1, true);
    for (auto _ : state) {
        auto ens = garchqr::run_ensemble(sim.returns, fit, B, garchqr::WeightLaw{}, 6, 11);
        benchmark::DoNotOptimize(ens.replicates.size());
    }
}

} // namespace

BENCHMARK(BM_BootstrapReplicate)->Arg(500)->Arg(1000)->Arg(2000);
BENCHMARK(BM_Ensemble)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
