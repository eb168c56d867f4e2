#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "garchqr/hybrid.hpp"
#include "garchqr/stats.hpp"
#include "test_util.hpp"

using namespace garchqr;
using testutil::garch11;

TEST_CASE("known-volatility intercept-only fit is the empirical quantile of y") {
    RngStream rng(40);
    std::vector<double> x(501);
    for (auto& v : x) v = rng.next_normal();
    const auto series = ReturnSeries::from_returns(std::move(x));
    const double tau = 0.1;
    const auto fit = fit_hybrid_with_volatility(series, 0, 0, tau, true,
                                                std::vector<double>(501, 1.0), 1.0);

    // sort oracle: n tau = 50.1 fractional, unique minimizer = order stat 51
    auto y = series.transformed();
    std::sort(y.begin(), y.end());
    const double expected = y[50];
    CHECK(fit.qparams.theta_tau[0] == doctest::Approx(expected).epsilon(1e-12));
    for (double q : fit.in_sample_q)
        CHECK(q == doctest::Approx(signed_sqrt(expected)).epsilon(1e-12));
    CHECK(fit.next_q == doctest::Approx(signed_sqrt(expected)).epsilon(1e-12));
}

TEST_CASE("median fit with symmetric innovations is near zero") {
    const auto sim = simulate_garch(garch11(0.4, 0.4, 0.4), InnovationLaw::normal(), 3000, 500, 12);
    const auto fit = fit_hybrid(sim.returns, 1, 1, 0.5, true);
    // theta_tau0 = b_0.5 theta = 0
    for (double c : fit.qparams.theta_tau) CHECK(std::abs(c) < 0.1);
    double mean_q = 0.0;
    for (double q : fit.in_sample_q) mean_q += std::abs(q);
    CHECK(mean_q / 3000.0 < 0.25);
}

TEST_CASE("quantile stage wiring") {
    const auto sim = simulate_garch(garch11(0.4, 0.2, 0.2), InnovationLaw::normal(), 400, 200, 8);
    const auto fit = fit_hybrid(sim.returns, 1, 1, 0.05, true);

    SUBCASE("weights are exactly 1/h") {
        for (std::size_t t = 0; t < fit.n(); ++t)
            CHECK(fit.qr_weights[t] == 1.0 / fit.vol_path.h[t]);
    }
    SUBCASE("responses are the transformed series") {
        for (std::size_t t = 0; t < fit.n(); ++t)
            CHECK(fit.responses[t] == signed_square(sim.returns[t]));
    }
    SUBCASE("in-sample quantiles invert the linear predictor") {
        for (std::size_t t = 0; t < fit.n(); ++t) {
            const double pred = dot(fit.regressors.row(t), fit.qparams.theta_tau);
            CHECK(fit.in_sample_q[t] == doctest::Approx(signed_sqrt(pred)).epsilon(1e-12));
            // sign of the estimate equals the sign of the predictor
            CHECK(((fit.in_sample_q[t] > 0) == (pred > 0)));
            CHECK(((fit.in_sample_q[t] < 0) == (pred < 0)));
        }
    }
    SUBCASE("forecast is the inverse-transformed predictor at z_{n+1}") {
        CHECK(forecast_next(fit) == fit.next_q);
        const double pred = dot(fit.z_next, fit.qparams.theta_tau);
        CHECK(fit.next_q == doctest::Approx(signed_sqrt(pred)).epsilon(1e-12));
        CHECK(fit.z_next[1] == doctest::Approx(sim.returns[399] * sim.returns[399]));
        CHECK(fit.z_next[2] == doctest::Approx(fit.vol_path.h[399]));
    }
    SUBCASE("basis rows have exactly zero residuals") {
        REQUIRE(fit.qr_basis.size() == 3);
        for (auto idx : fit.qr_basis) CHECK(fit.qr_residuals[idx] == 0.0);
    }
    SUBCASE("unweighted variant differs but has the same structure") {
        const auto unw = fit_hybrid(sim.returns, 1, 1, 0.05, false);
        for (std::size_t t = 0; t < unw.n(); ++t) CHECK(unw.qr_weights[t] == 1.0);
    }
}

TEST_CASE("forecast hand evaluation for ARCH(1) coefficients (-1,-2)") {
    // theta' z_{n+1} with x_n = 1 gives -1 - 2 = -3; back through the
    // transform that is -sqrt(3).
    const std::vector<double> theta{-1.0, -2.0};
    const std::vector<double> z_next{1.0, 1.0};
    CHECK(signed_sqrt(dot(z_next, theta)) == doctest::Approx(-std::sqrt(3.0)));
    const std::vector<double> zero{0.0, 0.0};
    CHECK(signed_sqrt(dot(z_next, zero)) == 0.0);
}

TEST_CASE("in-sample violation rate sits in the binomial band") {
    const double tau = 0.1;
    const std::size_t n = 2000;
    const auto sim = simulate_garch(garch11(0.4, 0.4, 0.4), InnovationLaw::normal(), n, 500, 99);
    const auto fit = fit_hybrid(sim.returns, 1, 1, tau, true);
    std::size_t violations = 0;
    for (std::size_t t = 0; t < n; ++t)
        if (sim.returns[t] < fit.in_sample_q[t]) ++violations;
    const double rate = static_cast<double>(violations) / static_cast<double>(n);
    const double band = 3.0 * std::sqrt(tau * (1.0 - tau) / static_cast<double>(n));
    CHECK(rate > tau - band);
    CHECK(rate < tau + band);
}

TEST_CASE("tau preconditions") {
    const auto sim = simulate_garch(garch11(0.4, 0.2, 0.2), InnovationLaw::normal(), 100, 50, 2);
    CHECK_THROWS_AS(fit_hybrid(sim.returns, 1, 1, 0.0, true), std::invalid_argument);
    CHECK_THROWS_AS(fit_hybrid(sim.returns, 1, 1, 1.0, true), std::invalid_argument);
}
