// Acceptance suite: one line per criterion, exit code = number of failures.
//
//   acceptance [--only cN] [--workers N]
//
// Criteria c1..c7, c9 are desk-scale statistical reproductions with pinned
// replication counts and tolerances; c8 is the exact/fast property batch;
// c10 is a reported-but-not-gating empirical coverage check (set
// GARCHQR_SP500_CSV to run it on a real price series).

#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "garchqr/backtest.hpp"
#include "garchqr/csv.hpp"
#include "garchqr/diagnostics.hpp"
#include "garchqr/hybrid.hpp"
#include "garchqr/montecarlo.hpp"
#include "garchqr/parallel.hpp"
#include "garchqr/stats.hpp"
#include "test_util.hpp"

using namespace garchqr;
using testutil::garch11;

namespace {

int g_workers = 0;
int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(const char* id, const char* name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] %s %s: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name, detail.c_str(),
                seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// c1: Table 1a hybrid cell (Model 1, normal, n=1000): in-sample MSE in
// [0.020, 0.040]; 200 replicates.
void criterion_c1() {
    Timer timer;
    ExperimentSpec spec;
    spec.dgp = garch11(0.1, 0.8, 0.15);
    spec.law = InnovationLaw::normal();
    spec.n = 1000;
    spec.reps = 200;
    spec.tau = 0.05;
    spec.methods = {Method::hybrid};
    spec.seed = 11001;
    spec.workers = g_workers;
    const auto result = run_comparison(spec);
    const double mse = result.comparison[0].mse_in;
    const bool pass = mse >= 0.020 && mse <= 0.040 && result.failures.empty();
    report("c1", "table1a-hybrid-mse", pass,
           fmt("in-sample MSE = %.4f, want [0.020, 0.040] (reference 0.028), %zu reps", mse,
               result.comparison[0].reps_used),
           timer.seconds());
}

// c2: hybrid in-sample MSE below both sieve variants for Model 1, normal,
// n in {500, 1000}; 200 replicates each.
void criterion_c2() {
    Timer timer;
    bool pass = true;
    std::string detail;
    for (std::size_t n : {std::size_t{500}, std::size_t{1000}}) {
        ExperimentSpec spec;
        spec.dgp = garch11(0.1, 0.8, 0.15);
        spec.law = InnovationLaw::normal();
        spec.n = n;
        spec.reps = 200;
        spec.tau = 0.05;
        spec.methods = {Method::hybrid, Method::qgarch1, Method::qgarch2};
        spec.seed = 11002;
        spec.workers = g_workers;
        const auto result = run_comparison(spec);
        const double h = result.comparison[0].mse_in;
        const double q1 = result.comparison[1].mse_in;
        const double q2 = result.comparison[2].mse_in;
        pass = pass && h < q1 && h < q2;
        detail += fmt("%sn=%zu: hybrid %.4f vs qgarch1 %.4f, qgarch2 %.4f", detail.empty() ? "" : "; ",
                      n, h, q1, q2);
    }
    report("c2", "table1a-ordering", pass, detail, timer.seconds());
}

// c3: ESD/ASD agreement (n=2000, tau=0.25, normal, W1): per component
// |ASD-ESD|/ESD < 0.20; 150 replicates x B=300.
void criterion_c3() {
    Timer timer;
    ExperimentSpec spec;
    spec.dgp = garch11(0.4, 0.4, 0.4);
    spec.law = InnovationLaw::normal();
    spec.n = 2000;
    spec.reps = 150;
    spec.tau = 0.25;
    spec.B = 300;
    spec.wlaw = WeightLaw{WeightLaw::Kind::exponential};
    spec.seed = 11003;
    spec.workers = g_workers;
    const auto result = run_inference_study(spec);
    bool pass = result.params.size() == 3;
    std::string detail;
    for (const auto& c : result.params) {
        const double rel = std::abs(c.asd - c.esd) / c.esd;
        pass = pass && rel < 0.20;
        detail += fmt("%s%s: esd %.4f asd %.4f (rel %.3f)", detail.empty() ? "" : "; ",
                      c.label.c_str(), c.esd, c.asd, rel);
    }
    report("c3", "table2-esd-asd", pass, detail, timer.seconds());
}

// c4: test size at d=0 (n=1000, tau=0.1) for each weight law: rejection
// rate in [2.5%, 7.5%]; 400 replicates x B=300. One fit per replicate
// feeds the three ensembles.
void criterion_c4() {
    Timer timer;
    const std::size_t reps = 400, B = 300, n = 1000, K = 6;
    const double tau = 0.1;
    const WeightLaw laws[3] = {WeightLaw{WeightLaw::Kind::exponential},
                               WeightLaw{WeightLaw::Kind::rademacher},
                               WeightLaw{WeightLaw::Kind::mammen}};
    std::vector<std::array<int, 3>> rejected(reps, {-1, -1, -1});
    parallel_for(reps, [&](std::size_t i) {
        try {
            const auto sub_seed = replicate_seed(11004, i);
            const auto sim =
                simulate_garch(garch11(0.4, 0.2, 0.2), InnovationLaw::normal(), n, 500, sub_seed);
            const auto fit = fit_hybrid(sim.returns, 1, 1, tau, true);
            for (int w = 0; w < 3; ++w) {
                const auto ens = run_ensemble(sim.returns, fit, B, laws[w], K,
                                              sub_seed ^ (0xB001ULL + w), 1);
                rejected[i][w] = portmanteau_test(fit, ens, K).p_value < 0.05 ? 1 : 0;
            }
        } catch (const std::exception&) {
            // leave as failed
        }
    }, g_workers);

    bool pass = true;
    std::string detail;
    for (int w = 0; w < 3; ++w) {
        std::size_t used = 0, hits = 0;
        for (std::size_t i = 0; i < reps; ++i) {
            if (rejected[i][w] < 0) continue;
            ++used;
            hits += rejected[i][w];
        }
        const double rate = 100.0 * static_cast<double>(hits) / static_cast<double>(used);
        pass = pass && rate >= 2.5 && rate <= 7.5 && used >= reps - 4;
        detail += fmt("%s%s: %.1f%% (%zu reps)", detail.empty() ? "" : "; ", laws[w].name(), rate,
                      used);
    }
    report("c4", "table4-size", pass, detail + " want [2.5, 7.5] (reference 4.7/4.4/4.3)",
           timer.seconds());
}

// c5: power is monotone in the lag-4 departure d at n=1000, tau=0.1;
// 300 replicates per cell.
void criterion_c5() {
    Timer timer;
    double rates[3] = {0, 0, 0};
    const double ds[3] = {0.0, 0.3, 0.6};
    for (int j = 0; j < 3; ++j) {
        ExperimentSpec spec;
        spec.dgp = garch11(0.4, 0.2, 0.2);
        spec.departure_d = ds[j];
        spec.law = InnovationLaw::normal();
        spec.n = 1000;
        spec.reps = 300;
        spec.tau = 0.1;
        spec.B = 300;
        spec.wlaw = WeightLaw{WeightLaw::Kind::exponential};
        spec.seed = 11005;
        spec.workers = g_workers;
        rates[j] = run_size_power(spec).size_power->rejection_rate;
    }
    const bool pass = rates[0] < rates[1] && rates[1] < rates[2];
    report("c5", "table4-power-monotone", pass,
           fmt("rates %.3f < %.3f < %.3f (reference 0.047/0.173/0.570)", rates[0], rates[1], rates[2]),
           timer.seconds());
}

// c6: weighted-vs-unweighted dispersion: componentwise IQR(weighted) <
// IQR(unweighted) at n=2000 for models (a)/(b), both laws; 300 replicates.
void criterion_c6() {
    Timer timer;
    bool pass = true;
    std::string detail;
    const GarchParams models[2] = {garch11(0.4, 0.2, 0.2), garch11(0.4, 0.2, 0.6)};
    const char* model_names[2] = {"(a)", "(b)"};
    const InnovationLaw laws[2] = {InnovationLaw::normal(), InnovationLaw::student(5.0)};
    for (int m = 0; m < 2; ++m) {
        for (int l = 0; l < 2; ++l) {
            ExperimentSpec spec;
            spec.dgp = models[m];
            spec.law = laws[l];
            spec.n = 2000;
            spec.reps = 300;
            spec.tau = 0.1;
            spec.seed = 11006;
            spec.workers = g_workers;
            const auto result = run_efficiency_study(spec);
            bool cell = result.components.size() == 3;
            double worst = 0.0;
            for (const auto& c : result.components) {
                cell = cell && c.iqr_weighted < c.iqr_unweighted;
                worst = std::max(worst, c.iqr_weighted / c.iqr_unweighted);
            }
            pass = pass && cell;
            detail += fmt("%s%s/%s max ratio %.3f", detail.empty() ? "" : "; ", model_names[m],
                          laws[l].name(), worst);
        }
    }
    report("c6", "fig3-weighted-efficiency", pass, detail, timer.seconds());
}

// c7: nested Monte-Carlo coverage of the bootstrap CI for the next-step
// conditional quantile: 200 outer simulations x B=500, coverage 95% +/- 4%.
void criterion_c7() {
    Timer timer;
    const std::size_t outer = 200, B = 500, n = 1000;
    const double tau = 0.1;
    const double q_eta = stats::normal_quantile(tau);
    std::vector<int> covered(outer, -1);
    parallel_for(outer, [&](std::size_t i) {
        try {
            const auto sub_seed = replicate_seed(11007, i);
            const auto sim =
                simulate_garch(garch11(0.4, 0.4, 0.4), InnovationLaw::normal(), n, 500, sub_seed);
            const double truth = std::sqrt(sim.next_volatility) * q_eta;
            const auto fit = fit_hybrid(sim.returns, 1, 1, tau, true);
            const auto ens = run_ensemble(sim.returns, fit, B,
                                          WeightLaw{WeightLaw::Kind::exponential}, 6,
                                          sub_seed ^ 0xB001ULL, 1);
            const auto ci = summarize(ens, fit).next_quantile_ci(0.95);
            covered[i] = (truth >= ci.lo && truth <= ci.hi) ? 1 : 0;
        } catch (const std::exception&) {
        }
    }, g_workers);
    std::size_t used = 0, hits = 0;
    for (int v : covered) {
        if (v < 0) continue;
        ++used;
        hits += v;
    }
    const double rate = 100.0 * static_cast<double>(hits) / static_cast<double>(used);
    const bool pass = rate >= 91.0 && rate <= 99.0 && used >= outer - 2;
    report("c7", "bootstrap-ci-coverage", pass,
           fmt("coverage %.1f%% (%zu sims), want 95%% +/- 4%%", rate, used), timer.seconds());
}

// c8: exact/fast property batch.
void criterion_c8() {
    Timer timer;
    bool pass = true;
    std::string detail;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) {
            pass = false;
            detail += fmt("%sFAILED: %s", detail.empty() ? "" : "; ", what);
        }
    };

    // transform round trip
    {
        RngStream rng(81);
        bool ok = true;
        for (int i = 0; i < 100000; ++i) {
            const double x = (rng.next_double() - 0.5) * 2e6;
            ok = ok && std::abs(signed_sqrt(signed_square(x)) - x) <= 1e-12 * (1.0 + std::abs(x));
        }
        expect(ok, "transform round trip");
    }
    // volatility gradient vs finite differences
    {
        const auto sim = simulate_garch(garch11(0.2, 0.3, 0.4), InnovationLaw::normal(), 80, 100, 3);
        RngStream rng(82);
        bool ok = true;
        for (int rep = 0; rep < 5 && ok; ++rep) {
            GarchParams p;
            p.alpha0 = 0.05 + rng.next_double();
            p.alpha = {0.02 + 0.6 * rng.next_double()};
            p.beta = {0.02 + 0.6 * rng.next_double()};
            const auto path = volatility_path(p, sim.returns, true);
            const auto theta = p.to_vector();
            for (std::size_t k = 0; k < 3 && ok; ++k) {
                auto hi = theta, lo = theta;
                hi[k] += 1e-6;
                lo[k] -= 1e-6;
                const auto ph =
                    volatility_path_unchecked(GarchParams::from_vector(hi, 1, 1), sim.returns, false);
                const auto pl =
                    volatility_path_unchecked(GarchParams::from_vector(lo, 1, 1), sim.returns, false);
                for (std::size_t t = 0; t < sim.returns.size(); ++t) {
                    const double fd = (ph.h[t] - pl.h[t]) / 2e-6;
                    ok = ok && std::abs(fd - path.gradient(t, k)) <=
                                   1e-5 * (1.0 + std::abs(path.gradient(t, k)));
                }
            }
        }
        expect(ok, "volatility gradient vs finite differences");
    }
    // qmle objective gradient vs finite differences (score assembly)
    {
        const auto sim = simulate_garch(garch11(0.2, 0.3, 0.4), InnovationLaw::normal(), 120, 100, 5);
        RngStream rng(83);
        bool ok = true;
        for (int rep = 0; rep < 20 && ok; ++rep) {
            GarchParams p;
            p.alpha0 = 0.05 + rng.next_double();
            p.alpha = {0.02 + 0.6 * rng.next_double()};
            p.beta = {0.02 + 0.6 * rng.next_double()};
            const auto path = volatility_path(p, sim.returns, true);
            std::vector<double> grad(3, 0.0);
            for (std::size_t t = 0; t < sim.returns.size(); ++t) {
                const double h = path.h[t];
                const double c = (1.0 - sim.returns[t] * sim.returns[t] / h) / h;
                for (std::size_t k = 0; k < 3; ++k) grad[k] += c * path.gradient(t, k);
            }
            const auto theta = p.to_vector();
            for (std::size_t k = 0; k < 3 && ok; ++k) {
                auto hi = theta, lo = theta;
                hi[k] += 1e-6;
                lo[k] -= 1e-6;
                const double fd = (qmle_objective(GarchParams::from_vector(hi, 1, 1), sim.returns) -
                                   qmle_objective(GarchParams::from_vector(lo, 1, 1), sim.returns)) /
                                  2e-6;
                ok = ok && std::abs(fd - grad[k]) <= 1e-4 * (1.0 + std::abs(grad[k]));
            }
        }
        expect(ok, "qmle gradient vs finite differences");
    }
    // quantile regression vs basis enumeration on small instances
    {
        RngStream rng(84);
        bool ok = true;
        for (int rep = 0; rep < 30 && ok; ++rep) {
            const std::size_t n = 8 + rng.next_u64() % 7;
            const std::size_t d = 1 + rng.next_u64() % 3;
            QrProblem p;
            p.tau = 0.05 + 0.9 * rng.next_double();
            p.design = Matrix(n, d, 0.0);
            for (std::size_t t = 0; t < n; ++t) {
                p.design(t, 0) = 1.0;
                for (std::size_t k = 1; k < d; ++k) p.design(t, k) = rng.next_normal();
                p.responses.push_back(rng.next_normal() * 2.0);
                p.weights.push_back(0.1 + rng.next_double());
            }
            const auto sol = solve_quantile_regression(p);
            const double oracle = testutil::qr_enumeration_minimum(p);
            ok = ok && std::abs(sol.objective - oracle) <= 1e-10 * (1.0 + oracle);
        }
        expect(ok, "qr basis-enumeration equivalence");
    }
    // subgradient optimality certificate on 1000 random problems
    {
        RngStream rng(85);
        bool ok = true;
        for (int rep = 0; rep < 1000 && ok; ++rep) {
            const std::size_t n = 10 + rng.next_u64() % 40;
            const std::size_t d = 1 + rng.next_u64() % 4;
            QrProblem p;
            p.tau = 0.02 + 0.96 * rng.next_double();
            p.design = Matrix(n, d, 0.0);
            for (std::size_t t = 0; t < n; ++t) {
                p.design(t, 0) = 1.0;
                for (std::size_t k = 1; k < d; ++k) p.design(t, k) = rng.next_normal();
                p.responses.push_back(rng.next_normal() * 2.0);
                p.weights.push_back(0.1 + rng.next_double());
            }
            const auto sol = solve_quantile_regression(p);
            const double mmax = std::max(p.tau, 1.0 - p.tau);
            for (std::size_t j = 0; j < d && ok; ++j) {
                double lhs = 0.0, envelope = 0.0;
                for (std::size_t t = 0; t < n; ++t) {
                    const double r = sol.residuals[t];
                    const double z = p.design(t, j);
                    if (r > 0.0) lhs += p.weights[t] * p.tau * z;
                    else if (r < 0.0) lhs -= p.weights[t] * (1.0 - p.tau) * z;
                    else envelope += p.weights[t] * mmax * std::abs(z);
                }
                const double slack = 1e-8 * (1.0 + envelope + std::abs(lhs));
                ok = ok && lhs >= -envelope - slack && lhs <= envelope + slack;
            }
        }
        expect(ok, "subgradient certificate");
    }
    // B1' identity and replicate reproduction at unit weights
    {
        const auto sim = simulate_garch(garch11(0.4, 0.4, 0.4), InnovationLaw::normal(), 300, 200, 8);
        const auto fit = fit_hybrid(sim.returns, 1, 1, 0.1, true);
        const std::vector<double> ones(300, 1.0);
        const auto ts = theta_star_update(*fit.qmle, sim.returns, ones);
        expect(ts == fit.qmle->theta_hat.to_vector(), "B1' identity at unit weights");
        const auto rep = make_replicate(fit, sim.returns, ones, 6);
        bool ok = rep.theta_tau_star == fit.qparams.theta_tau;
        for (double e : rep.e_stat) ok = ok && e == 0.0;
        for (double t : rep.t_stat) ok = ok && t == 0.0;
        expect(ok, "replicate reproduction at unit weights");
    }
    // ECR arithmetic exactness
    {
        const auto sim = simulate_garch(garch11(0.4, 0.2, 0.2), InnovationLaw::normal(), 300, 200, 9);
        BacktestSpec spec;
        spec.start_index = 250;
        spec.tau = 0.1;
        spec.method = Method::riskmetrics;
        const auto bt = backtest(sim.returns, spec);
        std::size_t violations = 0;
        for (const auto& f : bt.forecasts)
            if (f.ok && sim.returns[f.target] < f.forecast) ++violations;
        expect(bt.violations.size() == violations &&
                   bt.ecr == static_cast<double>(violations) / static_cast<double>(bt.evaluated),
               "ECR arithmetic exactness");
    }

    report("c8", "property-batch", pass, pass ? "all exact/fast properties hold" : detail,
           timer.seconds());
}

// c9: B1' averaging update vs the full weighted-QMLE optimization:
// RMS difference < 5/n over 100 replicates at n=1000.
void criterion_c9() {
    Timer timer;
    const std::size_t reps = 100, n = 1000;
    std::vector<double> sq(reps, 0.0);
    std::vector<int> ok(reps, 0);
    parallel_for(reps, [&](std::size_t i) {
        try {
            const auto sub_seed = replicate_seed(11009, i);
            const auto sim =
                simulate_garch(garch11(0.4, 0.4, 0.4), InnovationLaw::normal(), n, 500, sub_seed);
            const auto fit = fit_qmle(sim.returns, 1, 1);
            const auto w = draw_weights(WeightLaw{WeightLaw::Kind::exponential}, n, sub_seed ^ 0x51ULL);
            const auto quick = theta_star_update(fit, sim.returns, w);
            const auto full = theta_star_full_qmle(sim.returns, fit, w).to_vector();
            double s = 0.0;
            for (std::size_t k = 0; k < quick.size(); ++k)
                s += (quick[k] - full[k]) * (quick[k] - full[k]);
            sq[i] = s / static_cast<double>(quick.size());
            ok[i] = 1;
        } catch (const std::exception&) {
        }
    }, g_workers);
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < reps; ++i) {
        if (!ok[i]) continue;
        total += sq[i];
        ++used;
    }
    const double rms = std::sqrt(total / static_cast<double>(used));
    const double bound = 5.0 / static_cast<double>(n);
    const bool pass = rms < bound && used >= reps - 2;
    report("c9", "b1prime-vs-b1", pass,
           fmt("RMS difference %.5f = %.1f/n, want < %.4f = 5/n (%zu reps; the gap scales as "
               "1/n with this constant, see docs)",
               rms, rms * static_cast<double>(n), bound, used),
           timer.seconds());
}

// c10: empirical coverage rate of the rolling 5% VaR backtest. Reported,
// not gating: vendor data differences move the number. With
// GARCHQR_SP500_CSV set, the real series is used and compared to the
// reference 4.10%; otherwise a GARCH series calibrated to the fitted
// S&P coefficients stands in.
void criterion_c10() {
    Timer timer;
    std::string detail;
    try {
        std::vector<std::string> dates;
        ReturnSeries series = [&]() {
            if (const char* path = std::getenv("GARCHQR_SP500_CSV")) {
                auto loaded = load_series_csv(path);
                dates = loaded.dates;
                detail = "real series: ";
                return loaded.returns;
            }
            detail = "synthetic proxy (set GARCHQR_SP500_CSV for the real check): ";
            GarchParams sp;
            sp.alpha0 = 2.646e-6;
            sp.alpha = {0.126};
            sp.beta = {0.858};
            return simulate_garch(sp, InnovationLaw::normal(), 2139, 500, 20160630).returns;
        }();

        BacktestSpec spec;
        spec.start_index = 504; // two trading years of estimation sample
        spec.tau = 0.05;
        spec.method = Method::hybrid;
        spec.workers = g_workers;
        const auto bt = backtest(series, spec);
        const double ecr = 100.0 * bt.ecr;
        const bool in_band = std::abs(ecr - 4.10) <= 1.5;
        detail += fmt("ECR %.2f%% over %zu origins; reference 4.10%%, band +/-1.5pp %s", ecr,
                      bt.evaluated, in_band ? "met" : "NOT met");
        report("c10", "sp500-ecr-soft", true, detail + " [soft, non-gating]", timer.seconds());
    } catch (const std::exception& e) {
        report("c10", "sp500-ecr-soft", false, std::string("failed to run: ") + e.what(),
               timer.seconds());
    }
}

} // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = argv[++i];
        else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc)
            g_workers = std::atoi(argv[++i]);
    }
    auto want = [&](const char* id) { return only.empty() || only == id; };

    if (want("c1")) criterion_c1();
    if (want("c2")) criterion_c2();
    if (want("c3")) criterion_c3();
    if (want("c4")) criterion_c4();
    if (want("c5")) criterion_c5();
    if (want("c6")) criterion_c6();
    if (want("c7")) criterion_c7();
    if (want("c8")) criterion_c8();
    if (want("c9")) criterion_c9();
    if (want("c10")) criterion_c10();

    if (!only.empty() && g_failures == 0) return 0;
    if (only.empty())
        std::printf("%s: %d criterion(s) failed\n", g_failures ? "FAILURE" : "SUCCESS", g_failures);
    return g_failures;
}
