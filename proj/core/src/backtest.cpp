#include "garchqr/backtest.hpp"

#include <algorithm>
#include <stdexcept>

#include "garchqr/errors.hpp"
#include "garchqr/hybrid.hpp"
#include "garchqr/parallel.hpp"

namespace garchqr {

namespace {

ReturnSeries estimation_sample(const ReturnSeries& series, const BacktestSpec& spec,
                               std::size_t target) {
    if (spec.window == WindowKind::expanding) return series.prefix(target);
    const std::size_t len = spec.start_index;
    std::vector<double> window(series.values().begin() + (target - len),
                               series.values().begin() + target);
    return ReturnSeries::from_returns(std::move(window));
}

} // namespace

BacktestReport backtest(const ReturnSeries& series, const BacktestSpec& spec,
                        const std::vector<std::string>& dates) {
    const std::size_t n = series.size();
    const std::size_t dim = 1 + spec.p + spec.q;
    if (spec.start_index <= 10 * dim || spec.start_index >= n)
        throw std::invalid_argument("backtest: start_index leaves no room to estimate or forecast");
    if (!dates.empty() && dates.size() != n)
        throw std::invalid_argument("backtest: date labels must match the series length");
    if (!spec.subperiods.empty() && dates.empty())
        throw std::invalid_argument("backtest: subperiods need date labels");

    const std::size_t count = n - spec.start_index;
    std::vector<OriginForecast> slots(count);

    parallel_for(count, [&](std::size_t i) {
        const std::size_t target = spec.start_index + i;
        OriginForecast& out = slots[i];
        out.target = target;
        try {
            const auto sample = estimation_sample(series, spec, target);
            switch (spec.method) {
                case Method::hybrid: {
                    auto fit = fit_hybrid(sample, spec.p, spec.q, spec.tau, true);
                    out.forecast = forecast_next(fit);
                    if (spec.B > 0) {
                        const auto ensemble = run_ensemble(sample, fit, spec.B, spec.wlaw, spec.K,
                                                           spec.seed ^ (0x0F0FULL + target), 1);
                        out.ci = summarize(ensemble, fit).next_quantile_ci(spec.ci_level);
                    }
                    break;
                }
                case Method::qgarch1:
                case Method::qgarch2: {
                    SieveConfig config;
                    config.p = spec.p;
                    config.q = spec.q;
                    out.forecast =
                        qgarch_sieve(sample, spec.tau, config, spec.method == Method::qgarch2).next_q;
                    break;
                }
                case Method::caviar: {
                    CaviarOptions options;
                    options.screen_points = spec.caviar_screen;
                    options.seed = spec.seed ^ (0xCAFEULL + target);
                    out.forecast = caviar_indirect_garch(sample, spec.tau, options).forecast.next_q;
                    break;
                }
                case Method::riskmetrics:
                    out.forecast = riskmetrics(sample, spec.tau).next_q;
                    break;
            }
            out.ok = true;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    }, spec.workers);

    BacktestReport report;
    report.forecasts = std::move(slots);
    for (const auto& f : report.forecasts) {
        if (!f.ok) continue;
        ++report.evaluated;
        if (series[f.target] < f.forecast) report.violations.push_back(f.target);
    }
    report.ecr = report.evaluated
        ? static_cast<double>(report.violations.size()) / static_cast<double>(report.evaluated)
        : 0.0;

    for (const auto& [from, to] : spec.subperiods) {
        SubperiodEcr sub;
        sub.label = from + ".." + to;
        for (const auto& f : report.forecasts) {
            if (!f.ok) continue;
            const auto& d = dates[f.target];
            if (d < from || d > to) continue;
            ++sub.evaluated;
            if (series[f.target] < f.forecast) ++sub.violations;
        }
        sub.ecr = sub.evaluated
            ? static_cast<double>(sub.violations) / static_cast<double>(sub.evaluated)
            : 0.0;
        report.subperiods.push_back(std::move(sub));
    }
    return report;
}

} // namespace garchqr
