#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "garchqr/backtest.hpp"
#include "garchqr/montecarlo.hpp"
#include "garchqr/stats.hpp"
#include "test_util.hpp"

using namespace garchqr;
using testutil::garch11;

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.dgp = garch11(0.4, 0.4, 0.4);
    spec.law = InnovationLaw::normal();
    spec.n = 300;
    spec.reps = 8;
    spec.tau = 0.05;
    spec.methods = {Method::hybrid, Method::riskmetrics};
    spec.B = 50;
    spec.K = 6;
    spec.seed = 2024;
    return spec;
}

} // namespace

TEST_CASE("comparison study: determinism, pairing and the aggregation identity") {
    const auto spec = small_spec();
    const auto a = run_comparison(spec);
    const auto b = run_comparison(spec);
    REQUIRE(a.comparison.size() == 2);
    CHECK(a.failures.empty());
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(a.comparison[j].bias_in == b.comparison[j].bias_in);
        CHECK(a.comparison[j].mse_out == b.comparison[j].mse_out);
        CHECK(a.comparison[j].reps_used == spec.reps);
        // MSE = bias^2 + variance, the two moments accumulated separately
        const auto& c = a.comparison[j];
        CHECK(c.mse_in ==
              doctest::Approx(c.bias_in * c.bias_in + c.var_in).epsilon(1e-10));
        CHECK(c.mse_out ==
              doctest::Approx(c.bias_out * c.bias_out + c.var_out).epsilon(1e-10));
    }
    // hybrid beats riskmetrics on well-specified data even at this scale
    CHECK(a.comparison[0].mse_in < a.comparison[1].mse_in);
}

TEST_CASE("paired seeds: a method's cell does not depend on the method list") {
    auto spec = small_spec();
    spec.methods = {Method::hybrid};
    const auto solo = run_comparison(spec);
    spec.methods = {Method::riskmetrics, Method::hybrid};
    const auto both = run_comparison(spec);
    CHECK(solo.comparison[0].mse_in == both.comparison[1].mse_in);
    CHECK(solo.comparison[0].bias_out == both.comparison[1].bias_out);
}

TEST_CASE("zero replication count is rejected") {
    auto spec = small_spec();
    spec.reps = 0;
    CHECK_THROWS_AS(run_comparison(spec), std::invalid_argument);
    CHECK_THROWS_AS(run_inference_study(spec), std::invalid_argument);
    CHECK_THROWS_AS(run_size_power(spec), std::invalid_argument);
}

TEST_CASE("departure enters at lag four") {
    auto spec = small_spec();
    spec.departure_d = 0.3;
    const auto dgp = departure_dgp(spec);
    REQUIRE(dgp.alpha.size() == 4);
    CHECK(dgp.alpha[0] == doctest::Approx(0.4));
    CHECK(dgp.alpha[1] == 0.0);
    CHECK(dgp.alpha[2] == 0.0);
    CHECK(dgp.alpha[3] == doctest::Approx(0.3));
    spec.departure_d = 0.0;
    CHECK(departure_dgp(spec).alpha.size() == 1);
}

TEST_CASE("inference study produces finite components with sane labels") {
    auto spec = small_spec();
    spec.reps = 4;
    spec.B = 60;
    const auto r = run_inference_study(spec);
    REQUIRE(r.params.size() == 3);
    CHECK(r.params[0].label == "alpha0");
    CHECK(r.params[1].label == "alpha1");
    CHECK(r.params[2].label == "beta1");
    const double b_tau = signed_square(InnovationLaw::normal().quantile(0.05));
    CHECK(r.params[0].truth == doctest::Approx(b_tau * 0.4));
    for (const auto& c : r.params) {
        CHECK(std::isfinite(c.bias));
        CHECK(c.esd > 0.0);
        CHECK(c.asd > 0.0);
    }
    REQUIRE(r.qacf_lags.size() == 3); // lags 2, 4, 6
    CHECK(r.qacf_lags[0].label == "r2");
}

TEST_CASE("size-power study reports a rate") {
    auto spec = small_spec();
    spec.reps = 6;
    spec.B = 60;
    spec.tau = 0.1;
    const auto r = run_size_power(spec);
    REQUIRE(r.size_power.has_value());
    CHECK(r.size_power->reps_used == 6);
    CHECK(r.size_power->rejection_rate >= 0.0);
    CHECK(r.size_power->rejection_rate <= 1.0);
}

TEST_CASE("backtest on simulated data") {
    const auto sim = simulate_garch(garch11(0.4, 0.2, 0.2), InnovationLaw::normal(), 260, 200, 5);
    BacktestSpec spec;
    spec.start_index = 200;
    spec.tau = 0.1;
    spec.method = Method::riskmetrics; // estimation-free: fast and exact

    const auto report = backtest(sim.returns, spec);
    REQUIRE(report.forecasts.size() == 60);
    CHECK(report.evaluated == 60);

    SUBCASE("ecr arithmetic is exact and recomputable") {
        std::size_t violations = 0;
        for (const auto& f : report.forecasts) {
            CHECK(f.ok);
            if (sim.returns[f.target] < f.forecast) ++violations;
        }
        CHECK(report.violations.size() == violations);
        CHECK(report.ecr == static_cast<double>(violations) / 60.0);
    }

    SUBCASE("fixed and expanding windows share forecast indexing") {
        auto fixed_spec = spec;
        fixed_spec.window = WindowKind::fixed;
        const auto fixed_report = backtest(sim.returns, fixed_spec);
        REQUIRE(fixed_report.forecasts.size() == report.forecasts.size());
        for (std::size_t i = 0; i < report.forecasts.size(); ++i)
            CHECK(fixed_report.forecasts[i].target == report.forecasts[i].target);
    }

    SUBCASE("subperiod splits partition the evaluated origins") {
        std::vector<std::string> dates(260);
        for (std::size_t i = 0; i < 260; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "d%04zu", i);
            dates[i] = buf;
        }
        auto sp = spec;
        sp.subperiods = {{"d0200", "d0229"}, {"d0230", "d0259"}};
        const auto r2 = backtest(sim.returns, sp, dates);
        REQUIRE(r2.subperiods.size() == 2);
        CHECK(r2.subperiods[0].evaluated + r2.subperiods[1].evaluated == 60);
        CHECK(r2.subperiods[0].violations + r2.subperiods[1].violations ==
              r2.violations.size());
    }
}

TEST_CASE("constant series backtests to a degenerate ecr") {
    const auto series = ReturnSeries::from_returns(std::vector<double>(120, 0.5));
    BacktestSpec spec;
    spec.start_index = 100;
    spec.tau = 0.05;
    spec.method = Method::riskmetrics;
    const auto report = backtest(series, spec);
    // forecast approaches 0.5 * Phi^{-1}(0.05) < 0 < x_t: never violated
    CHECK(report.ecr == 0.0);
    for (const auto& f : report.forecasts) CHECK(f.forecast < 0.0);
}

TEST_CASE("oracle forecaster covers at the nominal rate") {
    // feed the true conditional quantiles: coverage is binomial around tau
    const double tau = 0.1;
    const auto sim = simulate_garch(garch11(0.4, 0.4, 0.4), InnovationLaw::normal(), 5000, 300, 9);
    const double qeta = InnovationLaw::normal().quantile(tau);
    std::size_t violations = 0;
    for (std::size_t t = 0; t < sim.returns.size(); ++t)
        if (sim.returns[t] < std::sqrt(sim.volatility[t]) * qeta) ++violations;
    const double rate = static_cast<double>(violations) / 5000.0;
    const double band = 3.0 * std::sqrt(tau * (1 - tau) / 5000.0);
    CHECK(std::abs(rate - tau) < band);
}

TEST_CASE("hybrid backtest with ci bands on a short window") {
    const auto sim = simulate_garch(garch11(0.4, 0.2, 0.2), InnovationLaw::normal(), 215, 200, 77);
    BacktestSpec spec;
    spec.start_index = 200;
    spec.tau = 0.1;
    spec.method = Method::hybrid;
    spec.B = 40;
    const auto report = backtest(sim.returns, spec);
    CHECK(report.evaluated == 15);
    for (const auto& f : report.forecasts) {
        REQUIRE(f.ok);
        REQUIRE(f.ci.has_value());
        CHECK(f.ci->lo <= f.ci->hi);
        // the point forecast usually sits inside its band; allow slack for
        // short-window percentile jitter
        CHECK(f.forecast >= f.ci->lo - 0.5);
        CHECK(f.forecast <= f.ci->hi + 0.5);
    }
}
