#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "garchqr/errors.hpp"
#include "garchqr/garch.hpp"
#include "garchqr/stats.hpp"
#include "test_util.hpp"

using namespace garchqr;
using testutil::arch1;
using testutil::garch11;

TEST_CASE("volatility recursion hand values for ARCH(1)") {
    const auto series = ReturnSeries::from_returns({1.0, 2.0});
    const auto path = volatility_path(arch1(1.0, 0.5), series, false);
    CHECK(path.init_constant == doctest::Approx(2.5));
    REQUIRE(path.h.size() == 2);
    CHECK(path.h[0] == doctest::Approx(2.25)); // 1 + 0.5 * 2.5
    CHECK(path.h[1] == doctest::Approx(1.5));  // 1 + 0.5 * 1
}

TEST_CASE("constant volatility when no lag terms") {
    const auto series = ReturnSeries::from_returns({0.3, -0.2, 0.5, 0.1});
    GarchParams constant;
    constant.alpha0 = 0.7;
    const auto path = volatility_path(constant, series, false);
    for (double h : path.h) CHECK(h == 0.7);
}

TEST_CASE("volatility path rejects parameters outside the admissible set") {
    const auto series = ReturnSeries::from_returns({1.0, 2.0});
    auto bad = garch11(0.1, 0.2, 0.7);
    bad.alpha[0] = -0.1;
    CHECK_THROWS_AS(volatility_path(bad, series, false), ConstraintViolation);
    auto big_beta = garch11(0.1, 0.2, 1.2);
    CHECK_THROWS_AS(volatility_path(big_beta, series, false), ConstraintViolation);
    CHECK_NOTHROW(volatility_path_unchecked(big_beta, series, false));
}

TEST_CASE("gradient matches central finite differences") {
    RngStream rng(11);
    std::vector<double> x(60);
    for (auto& v : x) v = rng.next_normal();
    const auto series = ReturnSeries::from_returns(std::move(x));

    auto check_at = [&](const GarchParams& params) {
        const auto path = volatility_path(params, series, true);
        const auto theta = params.to_vector();
        const double step = 1e-6;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            auto hi = theta, lo = theta;
            hi[k] += step;
            lo[k] -= step;
            const auto ph = volatility_path_unchecked(
                GarchParams::from_vector(hi, params.p(), params.q()), series, false);
            const auto pl = volatility_path_unchecked(
                GarchParams::from_vector(lo, params.p(), params.q()), series, false);
            for (std::size_t t = 0; t < series.size(); ++t) {
                const double fd = (ph.h[t] - pl.h[t]) / (2.0 * step);
                const double an = path.gradient(t, k);
                CHECK(std::abs(fd - an) <= 1e-5 * (1.0 + std::abs(an)));
            }
        }
    };
    check_at(garch11(0.1, 0.8, 0.15));
    check_at(garch11(0.4, 0.4, 0.4));
    // random interior points of the box
    for (int rep = 0; rep < 5; ++rep) {
        GarchParams p;
        p.alpha0 = 0.05 + rng.next_double();
        p.alpha = {0.05 + 0.5 * rng.next_double()};
        p.beta = {0.05 + 0.5 * rng.next_double()};
        check_at(p);
    }
}

TEST_CASE("regressor matrix rows") {
    const auto series = ReturnSeries::from_returns({1.0, 2.0});

    SUBCASE("arch(1) hand assembly") {
        const auto path = volatility_path(arch1(1.0, 0.5), series, false);
        const auto z = regressor_matrix(path, series);
        REQUIRE(z.rows() == 2);
        REQUIRE(z.cols() == 2);
        CHECK(z(0, 0) == 1.0);
        CHECK(z(0, 1) == doctest::Approx(2.5));
        CHECK(z(1, 0) == 1.0);
        CHECK(z(1, 1) == doctest::Approx(1.0));
    }

    SUBCASE("degenerate p=q=0 gives intercept-only rows") {
        GarchParams c;
        c.alpha0 = 0.3;
        const auto path = volatility_path(c, series, false);
        const auto z = regressor_matrix(path, series);
        REQUIRE(z.cols() == 1);
        CHECK(z(0, 0) == 1.0);
        CHECK(z(1, 0) == 1.0);
    }

    SUBCASE("garch(1,1) row structure and h identity") {
        const auto s2 = ReturnSeries::from_returns({0.5, -1.0, 2.0, 0.3});
        const auto params = garch11(0.1, 0.8, 0.15);
        const auto path = volatility_path(params, s2, false);
        const auto z = regressor_matrix(path, s2);
        const auto theta = params.to_vector();
        for (std::size_t t = 0; t < s2.size(); ++t) {
            // row t = (1, x^2_{t-1}, h_{t-1}) and h_t = theta' z_t
            if (t >= 1) {
                CHECK(z(t, 1) == doctest::Approx(s2[t - 1] * s2[t - 1]));
                CHECK(z(t, 2) == doctest::Approx(path.h[t - 1]));
            }
            CHECK(dot(z.row(t), theta) == doctest::Approx(path.h[t]).epsilon(1e-14));
        }
        // z_{n+1} from the last observation and fitted volatility
        const auto zn = regressor_next(path, s2);
        CHECK(zn[0] == 1.0);
        CHECK(zn[1] == doctest::Approx(0.09));
        CHECK(zn[2] == doctest::Approx(path.h[3]));
    }
}

TEST_CASE("h stays above alpha0 and the recursion is reproducible") {
    RngStream rng(5);
    std::vector<double> x(300);
    for (auto& v : x) v = rng.next_normal();
    const auto series = ReturnSeries::from_returns(std::move(x));
    const auto params = garch11(0.2, 0.3, 0.5);
    const auto a = volatility_path(params, series, true);
    const auto b = volatility_path(params, series, true);
    CHECK(a.h == b.h); // bitwise
    CHECK(a.gradient.data() == b.gradient.data());
    for (double h : a.h) CHECK(h >= params.alpha0);
}

TEST_CASE("simulation moments, determinism and innovation recovery") {
    SUBCASE("iid case reduces to scaled innovations") {
        GarchParams c;
        c.alpha0 = 0.49;
        const auto sim = simulate_garch(c, InnovationLaw::normal(), 20000, 100, 7);
        double s2 = 0.0;
        for (double v : sim.returns.values()) s2 += v * v;
        CHECK(s2 / 20000.0 == doctest::Approx(0.49).epsilon(0.05));
        for (double h : sim.volatility) CHECK(h == 0.49);
    }

    SUBCASE("stationary variance") {
        // Model 2 has a finite fourth moment, so the sample variance
        // concentrates at the stated tolerance.
        const auto sim = simulate_garch(garch11(0.1, 0.15, 0.8), InnovationLaw::normal(),
                                        100000, 500, 99);
        double s2 = 0.0;
        for (double v : sim.returns.values()) s2 += v * v;
        CHECK(s2 / 100000.0 == doctest::Approx(2.0).epsilon(0.10));

        // Model 1 shares the target E x^2 = 2 but E x^4 is infinite there,
        // so its sample variance mixes slowly; sanity band only.
        const auto heavy = simulate_garch(garch11(0.1, 0.8, 0.15), InnovationLaw::normal(),
                                          100000, 500, 99);
        double s2h = 0.0;
        for (double v : heavy.returns.values()) s2h += v * v;
        CHECK(s2h / 100000.0 > 0.5);
        CHECK(s2h / 100000.0 < 8.0);
    }

    SUBCASE("fixed seed reproduces bitwise") {
        const auto a = simulate_garch(garch11(0.1, 0.15, 0.8), InnovationLaw::student(5.0), 500,
                                      200, 1234);
        const auto b = simulate_garch(garch11(0.1, 0.15, 0.8), InnovationLaw::student(5.0), 500,
                                      200, 1234);
        CHECK(a.returns.values() == b.returns.values());
        CHECK(a.volatility == b.volatility);
        CHECK(a.next_volatility == b.next_volatility);
    }

    SUBCASE("standardized residuals recover the law (KS)") {
        for (const auto& law : {InnovationLaw::normal(), InnovationLaw::student(5.0)}) {
            const auto sim = simulate_garch(garch11(0.4, 0.4, 0.4), law, 10000, 500, 31);
            std::vector<double> eta(sim.returns.size());
            for (std::size_t t = 0; t < eta.size(); ++t)
                eta[t] = sim.returns[t] / std::sqrt(sim.volatility[t]);
            std::sort(eta.begin(), eta.end());
            double d = 0.0;
            const double n = static_cast<double>(eta.size());
            for (std::size_t i = 0; i < eta.size(); ++i) {
                const double f = law.cdf(eta[i]);
                d = std::max(d, std::abs(f - static_cast<double>(i) / n));
                d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
            }
            CHECK(stats::kolmogorov_smirnov_pvalue(d, eta.size()) > 0.01);
        }
    }

    SUBCASE("next volatility extends the recursion") {
        const auto sim = simulate_garch(garch11(0.1, 0.8, 0.15), InnovationLaw::normal(), 50, 10, 3);
        const double xn = sim.returns[49];
        CHECK(sim.next_volatility ==
              doctest::Approx(0.1 + 0.8 * xn * xn + 0.15 * sim.volatility[49]).epsilon(1e-14));
    }
}

TEST_CASE("theta box membership and projection") {
    ThetaBox box;
    CHECK(box.contains(garch11(0.1, 0.8, 0.15)));
    GarchParams zero_alpha = garch11(0.1, 0.0, 0.15);
    CHECK_FALSE(box.contains(zero_alpha));     // full membership needs w_lo
    CHECK(box.admits_recursion(zero_alpha));   // recursion allows zero lags
    auto projected = box.project(garch11(0.1, 0.8, 1.5));
    CHECK(projected.beta_sum() <= box.rho0 + 1e-15);
    ThetaBox bad;
    bad.rho0 = 0.0;
    CHECK_THROWS_AS(bad.validate(1), ConstraintViolation);
}
