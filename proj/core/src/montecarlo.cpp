#include "garchqr/montecarlo.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "garchqr/diagnostics.hpp"
#include "garchqr/errors.hpp"
#include "garchqr/hybrid.hpp"
#include "garchqr/parallel.hpp"
#include "garchqr/stats.hpp"

namespace garchqr {

namespace {

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

// Streaming mean/variance (Welford); the variance route is independent of
// the bias/MSE moment sums so the aggregation identity is a real check.
struct Accumulator {
    std::size_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double e) {
        ++count;
        sum += e;
        sum_sq += e * e;
        const double d = e - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (e - mean);
    }
    void merge(const Accumulator& o) {
        if (o.count == 0) return;
        if (count == 0) { *this = o; return; }
        const double delta = o.mean - mean;
        const auto total = count + o.count;
        m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) /
                         static_cast<double>(total);
        mean += delta * static_cast<double>(o.count) / static_cast<double>(total);
        sum += o.sum;
        sum_sq += o.sum_sq;
        count = total;
    }
    double bias() const { return count ? sum / static_cast<double>(count) : 0.0; }
    double mse() const { return count ? sum_sq / static_cast<double>(count) : 0.0; }
    double variance() const { return count ? m2 / static_cast<double>(count) : 0.0; }
};

std::vector<double> true_quantiles(const SimulatedSeries& sim, double q_eta) {
    std::vector<double> q(sim.volatility.size());
    for (std::size_t t = 0; t < q.size(); ++t) q[t] = std::sqrt(sim.volatility[t]) * q_eta;
    return q;
}

} // namespace

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate) {
    RngStream rng(seed, 0x4d43ULL + replicate); // distinct stream family for the harness
    return rng.next_u64();
}

GarchParams departure_dgp(const ExperimentSpec& spec) {
    GarchParams dgp = spec.dgp;
    if (spec.departure_d > 0.0) {
        if (dgp.alpha.size() < 4) dgp.alpha.resize(4, 0.0);
        dgp.alpha[3] += spec.departure_d;
    }
    return dgp;
}

ExperimentResult run_comparison(const ExperimentSpec& spec) {
    if (spec.reps == 0) throw std::invalid_argument("run_comparison: reps must be positive");
    if (spec.methods.empty()) throw std::invalid_argument("run_comparison: no methods selected");
    Timer timer;
    const auto dgp = departure_dgp(spec);
    const double q_eta = spec.law.quantile(spec.tau);
    const std::size_t m = spec.methods.size();

    struct Slot {
        std::vector<Accumulator> in, out;
        std::vector<char> ok;
        std::string error;
    };
    std::vector<Slot> slots(spec.reps);

    parallel_for(spec.reps, [&](std::size_t i) {
        Slot& slot = slots[i];
        slot.in.resize(m);
        slot.out.resize(m);
        slot.ok.assign(m, 0);
        const auto sub_seed = replicate_seed(spec.seed, i);
        std::optional<SimulatedSeries> maybe_sim;
        try {
            maybe_sim = simulate_garch(dgp, spec.law, spec.n, spec.burn_in, sub_seed);
        } catch (const std::exception& e) {
            slot.error = std::string("simulate: ") + e.what();
            return;
        }
        const SimulatedSeries& sim = *maybe_sim;
        const auto q_true = true_quantiles(sim, q_eta);
        const double q_true_next = std::sqrt(sim.next_volatility) * q_eta;

        for (std::size_t j = 0; j < m; ++j) {
            try {
                std::vector<double> in_q;
                double next_q = 0.0;
                switch (spec.methods[j]) {
                    case Method::hybrid: {
                        auto fit = fit_hybrid(sim.returns, spec.fit_p, spec.fit_q, spec.tau, true);
                        in_q = std::move(fit.in_sample_q);
                        next_q = fit.next_q;
                        break;
                    }
                    case Method::qgarch1:
                    case Method::qgarch2: {
                        SieveConfig config;
                        config.p = spec.fit_p;
                        config.q = spec.fit_q;
                        auto fc = qgarch_sieve(sim.returns, spec.tau, config,
                                               spec.methods[j] == Method::qgarch2);
                        in_q = std::move(fc.in_sample_q);
                        next_q = fc.next_q;
                        break;
                    }
                    case Method::caviar: {
                        CaviarOptions options;
                        options.screen_points = spec.caviar_screen;
                        options.seed = sub_seed ^ 0xCAFEULL;
                        auto res = caviar_indirect_garch(sim.returns, spec.tau, options);
                        in_q = std::move(res.forecast.in_sample_q);
                        next_q = res.forecast.next_q;
                        break;
                    }
                    case Method::riskmetrics: {
                        auto fc = riskmetrics(sim.returns, spec.tau);
                        in_q = std::move(fc.in_sample_q);
                        next_q = fc.next_q;
                        break;
                    }
                }
                for (std::size_t t = 0; t < spec.n; ++t) slot.in[j].add(in_q[t] - q_true[t]);
                slot.out[j].add(next_q - q_true_next);
                slot.ok[j] = 1;
            } catch (const std::exception& e) {
                slot.error += std::string(slot.error.empty() ? "" : "; ") +
                              method_name(spec.methods[j]) + ": " + e.what();
            }
        }
    }, spec.workers);

    ExperimentResult result;
    result.reps = spec.reps;
    result.comparison.resize(m);
    std::vector<Accumulator> agg_in(m), agg_out(m);
    std::vector<std::size_t> used(m, 0);
    for (std::size_t i = 0; i < spec.reps; ++i) {
        if (!slots[i].error.empty()) result.failures.emplace_back(i, slots[i].error);
        for (std::size_t j = 0; j < m; ++j) {
            if (!slots[i].ok.empty() && slots[i].ok[j]) {
                agg_in[j].merge(slots[i].in[j]);
                agg_out[j].merge(slots[i].out[j]);
                ++used[j];
            }
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        auto& cell = result.comparison[j];
        cell.method = spec.methods[j];
        cell.bias_in = agg_in[j].bias();
        cell.mse_in = agg_in[j].mse();
        cell.var_in = agg_in[j].variance();
        cell.bias_out = agg_out[j].bias();
        cell.mse_out = agg_out[j].mse();
        cell.var_out = agg_out[j].variance();
        cell.reps_used = used[j];
    }
    result.wall_seconds = timer.seconds();
    return result;
}

ExperimentResult run_inference_study(const ExperimentSpec& spec) {
    if (spec.reps == 0) throw std::invalid_argument("run_inference_study: reps must be positive");
    Timer timer;
    const auto dgp = departure_dgp(spec);
    const double b_tau = signed_square(spec.law.quantile(spec.tau));
    const std::size_t dim = 1 + spec.fit_p + spec.fit_q;

    // QACF lags reported: 2, 4, ..., <= K (the paper's selection).
    std::vector<std::size_t> lags;
    for (std::size_t k = 2; k <= spec.K; k += 2) lags.push_back(k);

    struct Slot {
        bool ok = false;
        std::string error;
        std::vector<double> theta;     // dim
        std::vector<double> asd;       // dim
        std::vector<double> r;         // per selected lag
        std::vector<double> r_asd;     // per selected lag
    };
    std::vector<Slot> slots(spec.reps);

    parallel_for(spec.reps, [&](std::size_t i) {
        Slot& slot = slots[i];
        try {
            const auto sub_seed = replicate_seed(spec.seed, i);
            const auto sim = simulate_garch(dgp, spec.law, spec.n, spec.burn_in, sub_seed);
            auto fit = fit_hybrid(sim.returns, spec.fit_p, spec.fit_q, spec.tau, true);
            const auto ensemble =
                run_ensemble(sim.returns, fit, spec.B, spec.wlaw, spec.K, sub_seed ^ 0xB001ULL, 1);
            const auto summary = summarize(ensemble, fit);
            const auto residuals = weighted_residuals(fit);
            const auto r_all = qacf(residuals, spec.tau, spec.K);

            slot.theta = fit.qparams.theta_tau;
            slot.asd = summary.asd();
            const double sqrt_n = std::sqrt(static_cast<double>(spec.n));
            for (std::size_t k : lags) {
                slot.r.push_back(r_all[k - 1]);
                std::vector<double> tk(ensemble.replicates.size());
                for (std::size_t b = 0; b < tk.size(); ++b)
                    tk[b] = ensemble.replicates[b].t_stat[k - 1];
                slot.r_asd.push_back(stats::sample_sd(tk) / sqrt_n);
            }
            slot.ok = true;
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    }, spec.workers);

    ExperimentResult result;
    result.reps = spec.reps;
    const auto theta0 = spec.dgp.to_vector();

    std::vector<std::vector<double>> theta_cols(dim), asd_cols(dim);
    std::vector<std::vector<double>> r_cols(lags.size()), r_asd_cols(lags.size());
    for (std::size_t i = 0; i < spec.reps; ++i) {
        if (!slots[i].ok) {
            result.failures.emplace_back(i, slots[i].error);
            continue;
        }
        for (std::size_t k = 0; k < dim; ++k) {
            theta_cols[k].push_back(slots[i].theta[k]);
            asd_cols[k].push_back(slots[i].asd[k]);
        }
        for (std::size_t k = 0; k < lags.size(); ++k) {
            r_cols[k].push_back(slots[i].r[k]);
            r_asd_cols[k].push_back(slots[i].r_asd[k]);
        }
    }

    auto component_label = [&](std::size_t k) {
        if (k == 0) return std::string("alpha0");
        if (k <= spec.fit_q) return "alpha" + std::to_string(k);
        return "beta" + std::to_string(k - spec.fit_q);
    };
    for (std::size_t k = 0; k < dim; ++k) {
        if (theta_cols[k].size() < 2) break;
        InferenceComponent c;
        c.label = component_label(k);
        c.truth = b_tau * theta0[k];
        c.bias = stats::mean(theta_cols[k]) - c.truth;
        c.esd = stats::sample_sd(theta_cols[k]);
        c.asd = stats::mean(asd_cols[k]);
        result.params.push_back(std::move(c));
    }
    for (std::size_t k = 0; k < lags.size(); ++k) {
        if (r_cols[k].size() < 2) break;
        InferenceComponent c;
        c.label = "r" + std::to_string(lags[k]);
        c.truth = 0.0;
        c.bias = stats::mean(r_cols[k]);
        c.esd = stats::sample_sd(r_cols[k]);
        c.asd = stats::mean(r_asd_cols[k]);
        result.qacf_lags.push_back(std::move(c));
    }
    result.wall_seconds = timer.seconds();
    return result;
}

ExperimentResult run_size_power(const ExperimentSpec& spec) {
    if (spec.reps == 0) throw std::invalid_argument("run_size_power: reps must be positive");
    Timer timer;
    const auto dgp = departure_dgp(spec);

    std::vector<int> rejected(spec.reps, -1); // -1 failed, 0 accept, 1 reject
    std::vector<std::string> errors(spec.reps);
    parallel_for(spec.reps, [&](std::size_t i) {
        try {
            const auto sub_seed = replicate_seed(spec.seed, i);
            const auto sim = simulate_garch(dgp, spec.law, spec.n, spec.burn_in, sub_seed);
            auto fit = fit_hybrid(sim.returns, spec.fit_p, spec.fit_q, spec.tau, true);
            const auto ensemble =
                run_ensemble(sim.returns, fit, spec.B, spec.wlaw, spec.K, sub_seed ^ 0xB001ULL, 1);
            const auto report = portmanteau_test(fit, ensemble, spec.K);
            rejected[i] = report.p_value < 0.05 ? 1 : 0;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }, spec.workers);

    ExperimentResult result;
    result.reps = spec.reps;
    std::size_t used = 0, hits = 0;
    for (std::size_t i = 0; i < spec.reps; ++i) {
        if (rejected[i] < 0) {
            result.failures.emplace_back(i, errors[i]);
            continue;
        }
        ++used;
        hits += rejected[i] == 1;
    }
    if (used == 0) throw SolverError("run_size_power: every replicate failed");
    result.size_power = SizePowerCell{static_cast<double>(hits) / static_cast<double>(used), used};
    result.wall_seconds = timer.seconds();
    return result;
}

EfficiencyResult run_efficiency_study(const ExperimentSpec& spec) {
    if (spec.reps == 0) throw std::invalid_argument("run_efficiency_study: reps must be positive");
    Timer timer;
    const auto dgp = departure_dgp(spec);
    const std::size_t dim = 1 + spec.fit_p + spec.fit_q;

    struct Slot {
        bool ok = false;
        std::string error;
        std::vector<double> weighted, unweighted;
    };
    std::vector<Slot> slots(spec.reps);
    parallel_for(spec.reps, [&](std::size_t i) {
        Slot& slot = slots[i];
        try {
            const auto sub_seed = replicate_seed(spec.seed, i);
            const auto sim = simulate_garch(dgp, spec.law, spec.n, spec.burn_in, sub_seed);
            // one QMLE stage feeds both quantile regressions
            const auto qfit = fit_qmle(sim.returns, spec.fit_p, spec.fit_q);
            QmleOptions warm;
            warm.warm_start = qfit.theta_hat;
            slot.weighted = fit_hybrid(sim.returns, spec.fit_p, spec.fit_q, spec.tau, true,
                                       ThetaBox{}, warm).qparams.theta_tau;
            slot.unweighted = fit_hybrid(sim.returns, spec.fit_p, spec.fit_q, spec.tau, false,
                                         ThetaBox{}, warm).qparams.theta_tau;
            slot.ok = true;
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    }, spec.workers);

    EfficiencyResult result;
    result.reps = spec.reps;
    std::vector<std::vector<double>> wcols(dim), ucols(dim);
    for (std::size_t i = 0; i < spec.reps; ++i) {
        if (!slots[i].ok) {
            result.failures.emplace_back(i, slots[i].error);
            continue;
        }
        for (std::size_t k = 0; k < dim; ++k) {
            wcols[k].push_back(slots[i].weighted[k]);
            ucols[k].push_back(slots[i].unweighted[k]);
        }
    }
    auto component_label = [&](std::size_t k) {
        if (k == 0) return std::string("alpha0");
        if (k <= spec.fit_q) return "alpha" + std::to_string(k);
        return "beta" + std::to_string(k - spec.fit_q);
    };
    for (std::size_t k = 0; k < dim; ++k) {
        if (wcols[k].size() < 4) break;
        result.components.push_back(EfficiencyComponent{
            component_label(k), stats::iqr(wcols[k]), stats::iqr(ucols[k])});
    }
    result.wall_seconds = timer.seconds();
    return result;
}

} // namespace garchqr
