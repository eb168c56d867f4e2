#include "garchqr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "garchqr/errors.hpp"
#include "garchqr/hybrid.hpp"
#include "garchqr/linalg.hpp"
#include "garchqr/quantile_regression.hpp"
#include "garchqr/rng.hpp"
#include "garchqr/stats.hpp"

namespace garchqr {

Method method_from_name(const std::string& name) {
    if (name == "hybrid") return Method::hybrid;
    if (name == "qgarch1") return Method::qgarch1;
    if (name == "qgarch2") return Method::qgarch2;
    if (name == "caviar") return Method::caviar;
    if (name == "riskmetrics" || name == "riskm") return Method::riskmetrics;
    throw std::invalid_argument("unknown method: " + name);
}

const char* method_name(Method method) {
    switch (method) {
        case Method::hybrid: return "hybrid";
        case Method::qgarch1: return "qgarch1";
        case Method::qgarch2: return "qgarch2";
        case Method::caviar: return "caviar";
        case Method::riskmetrics: return "riskmetrics";
    }
    return "?";
}

BaselineForecast riskmetrics(const ReturnSeries& series, double tau) {
    const std::size_t n = series.size();
    if (n < 2) throw std::invalid_argument("riskmetrics: need at least two observations");
    const double z = stats::normal_quantile(tau);
    BaselineForecast out;
    out.method = Method::riskmetrics;
    out.in_sample_q.resize(n);
    double h = series[0] * series[0];
    out.in_sample_q[0] = std::sqrt(h) * z;
    for (std::size_t t = 1; t < n; ++t) {
        h = 0.06 * series[t - 1] * series[t - 1] + 0.94 * h;
        out.in_sample_q[t] = std::sqrt(h) * z;
    }
    h = 0.06 * series[n - 1] * series[n - 1] + 0.94 * h;
    out.next_q = std::sqrt(h) * z;
    return out;
}

namespace {

Matrix sieve_design(const ReturnSeries& series, std::size_t m, double init) {
    const std::size_t n = series.size();
    Matrix s(n, m + 1, 0.0);
    for (std::size_t t = 1; t <= n; ++t) {
        auto row = s.row(t - 1);
        row[0] = 1.0;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::ptrdiff_t lag = static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(j);
            row[j] = lag >= 1 ? series[static_cast<std::size_t>(lag - 1)] * series[static_cast<std::size_t>(lag - 1)]
                              : init;
        }
    }
    return s;
}

std::vector<double> sieve_row_next(const ReturnSeries& series, std::size_t m, double init) {
    const std::size_t n = series.size();
    std::vector<double> row(m + 1, 0.0);
    row[0] = 1.0;
    for (std::size_t j = 1; j <= m; ++j) {
        const std::ptrdiff_t lag = static_cast<std::ptrdiff_t>(n) + 1 - static_cast<std::ptrdiff_t>(j);
        row[j] = lag >= 1 ? series[static_cast<std::size_t>(lag - 1)] * series[static_cast<std::size_t>(lag - 1)]
                          : init;
    }
    return row;
}

std::vector<double> sieve_coef(const Matrix& design, const std::vector<double>& responses,
                               double tau, std::size_t m) {
    QrProblem problem;
    problem.design = design;
    problem.responses = responses;
    problem.weights.assign(responses.size(), 1.0);
    problem.tau = tau;
    try {
        return solve_quantile_regression(problem).coef;
    } catch (const SolverError& e) {
        throw SolverError(std::string("sieve regression failed (try a smaller order m=") +
                          std::to_string(m) + "): " + e.what());
    }
}

// predictor -> strictly positive volatility proxies with unit mean scale.
// Sign-flipped points (the sieve can overshoot through zero at a few
// observations) are floored near the low quantile of the valid proxies, so
// they neither explode the 1/h weights nor poison the design column.
std::vector<double> normalize_proxy(std::vector<double> pred) {
    const double mean = stats::mean(pred);
    if (mean == 0.0) throw SolverError("sieve proxy: zero-mean predictor");
    for (auto& v : pred) v /= mean;
    std::vector<double> positive;
    positive.reserve(pred.size());
    for (double v : pred)
        if (v > 0.0) positive.push_back(v);
    if (2 * positive.size() < pred.size())
        throw SolverError("sieve proxy: predictor sign-inconsistent (try a smaller order m)");
    const double floor = std::max(0.5 * stats::quantile_type7(positive, 0.01), 1e-6);
    for (auto& v : pred) v = std::max(v, floor);
    return pred;
}

} // namespace

BaselineForecast qgarch_sieve(const ReturnSeries& series, double tau, const SieveConfig& config,
                              bool multi_tau) {
    const std::size_t n = series.size();
    const double init = series.mean_square();
    const auto y = series.transformed();

    if (config.intercept_only) {
        // Degenerate sieve: the unconditional quantile of y mapped back.
        const double q = stats::quantile_type7(y, tau);
        BaselineForecast out;
        out.method = multi_tau ? Method::qgarch2 : Method::qgarch1;
        out.in_sample_q.assign(n, signed_sqrt(q));
        out.next_q = signed_sqrt(q);
        return out;
    }

    const std::size_t m = config.m > 0
        ? config.m
        : static_cast<std::size_t>(std::ceil(3.0 * std::pow(static_cast<double>(n), 0.25)));
    if (n <= 4 * m) throw std::invalid_argument("qgarch_sieve: need n > 4m");

    const auto design = sieve_design(series, m, init);
    const auto next_row = sieve_row_next(series, m, init);

    std::vector<double> predictor(n);
    double predictor_next = 0.0;

    if (!multi_tau) {
        const auto gamma = sieve_coef(design, y, tau, m);
        for (std::size_t t = 0; t < n; ++t) predictor[t] = dot(design.row(t), gamma);
        predictor_next = dot(next_row, gamma);
        if (config.direct) {
            BaselineForecast out;
            out.method = Method::qgarch1;
            out.in_sample_q.resize(n);
            for (std::size_t t = 0; t < n; ++t) out.in_sample_q[t] = signed_sqrt(predictor[t]);
            out.next_q = signed_sqrt(predictor_next);
            return out;
        }
    } else {
        // 19 sieve fits combined under the proportionality restriction
        // gamma_tau = b_tau gamma by identity-weighted minimum distance,
        // i.e. the rank-one fit of the coefficient matrix.
        Matrix coefs(19, m + 1);
        for (int i = 1; i <= 19; ++i) {
            const auto g = sieve_coef(design, y, static_cast<double>(i) / 20.0, m);
            for (std::size_t k = 0; k <= m; ++k) coefs(i - 1, k) = g[k];
        }
        const auto gram = matmul(transpose(coefs), coefs);
        auto gamma = leading_eigenvector(gram);
        for (std::size_t t = 0; t < n; ++t) predictor[t] = dot(design.row(t), gamma);
        predictor_next = dot(next_row, gamma);
        if (config.direct)
            throw std::invalid_argument("qgarch_sieve: direct mode is single-tau only");
    }

    auto proxy = normalize_proxy(std::move(predictor));
    const double proxy_mean = stats::mean(proxy);
    auto fit = fit_hybrid_with_volatility(series, config.p, config.q, tau, true, proxy, proxy_mean);

    BaselineForecast out;
    out.method = multi_tau ? Method::qgarch2 : Method::qgarch1;
    out.in_sample_q = fit.in_sample_q;
    out.next_q = fit.next_q;
    return out;
}

namespace {

struct CaviarObjective {
    const ReturnSeries& series;
    double tau;
    double sign;
    double v1; // initial squared quantile

    double operator()(const std::vector<double>& raw) const {
        const double a0 = std::clamp(raw[0], 0.0, 1e6);
        const double a1 = std::clamp(raw[1], 0.0, 10.0);
        const double a2 = std::clamp(raw[2], 0.0, 0.9999);
        const std::size_t n = series.size();
        double v = v1;
        double obj = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (t > 0) v = a0 + a1 * series[t - 1] * series[t - 1] + a2 * v;
            obj += check_loss(series[t] - sign * std::sqrt(std::max(v, 0.0)), tau);
        }
        return obj;
    }
};

std::vector<double> nelder_mead(const CaviarObjective& f, std::vector<double> start,
                                const std::vector<double>& scale, int max_iter) {
    const std::size_t d = start.size();
    std::vector<std::vector<double>> simplex(d + 1, start);
    std::vector<double> values(d + 1);
    for (std::size_t k = 0; k < d; ++k)
        simplex[k + 1][k] += scale[k] > 0.0 ? 0.1 * scale[k] : 0.01;
    for (std::size_t k = 0; k <= d; ++k) values[k] = f(simplex[k]);

    for (int it = 0; it < max_iter; ++it) {
        std::vector<std::size_t> order(d + 1);
        for (std::size_t k = 0; k <= d; ++k) order[k] = k;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order[0], worst = order[d], second = order[d - 1];
        if (std::abs(values[worst] - values[best]) <=
            1e-12 * (1.0 + std::abs(values[best])))
            break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t k = 0; k <= d; ++k) {
            if (k == worst) continue;
            for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[k][j];
        }
        for (auto& c : centroid) c /= static_cast<double>(d);

        auto blend = [&](double coef) {
            std::vector<double> p(d);
            for (std::size_t j = 0; j < d; ++j)
                p[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
            return p;
        };

        auto reflect = blend(-1.0);
        const double fr = f(reflect);
        if (fr < values[best]) {
            auto expand = blend(-2.0);
            const double fe = f(expand);
            if (fe < fr) { simplex[worst] = expand; values[worst] = fe; }
            else { simplex[worst] = reflect; values[worst] = fr; }
        } else if (fr < values[second]) {
            simplex[worst] = reflect;
            values[worst] = fr;
        } else {
            auto contract = blend(0.5);
            const double fc = f(contract);
            if (fc < values[worst]) {
                simplex[worst] = contract;
                values[worst] = fc;
            } else {
                for (std::size_t k = 0; k <= d; ++k) {
                    if (k == best) continue;
                    for (std::size_t j = 0; j < d; ++j)
                        simplex[k][j] = simplex[best][j] + 0.5 * (simplex[k][j] - simplex[best][j]);
                    values[k] = f(simplex[k]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k <= d; ++k)
        if (values[k] < values[best]) best = k;
    return simplex[best];
}

} // namespace

CaviarResult caviar_indirect_garch(const ReturnSeries& series, double tau,
                                   const CaviarOptions& options) {
    const std::size_t n = series.size();
    if (n < 20) throw std::invalid_argument("caviar: series too short");
    const double eq = stats::quantile_type7(series.values(), tau);
    const double sign = tau < 0.5 ? -1.0 : (tau > 0.5 ? 1.0 : 0.0);
    const CaviarObjective objective{series, tau, sign, eq * eq};

    const double a0_hi = 1.5 * std::max(eq * eq, series.mean_square());
    RngStream rng(options.seed);

    // Random screen, then Nelder-Mead from the best handful.
    std::vector<std::pair<double, std::vector<double>>> best;
    auto consider = [&](std::vector<double> p) {
        const double v = objective(p);
        best.emplace_back(v, std::move(p));
        std::sort(best.begin(), best.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (best.size() > 5) best.pop_back();
    };
    consider({eq * eq, 0.0, 0.0}); // constant-quantile point
    for (std::size_t i = 0; i < options.screen_points; ++i)
        consider({rng.next_double() * a0_hi, rng.next_double(), rng.next_double() * 0.9999});
    if (options.warm_start) consider(*options.warm_start);

    const std::vector<double> scale{std::max(a0_hi, 1e-8), 0.5, 0.5};
    std::vector<double> argmin = best.front().second;
    double minval = best.front().first;
    for (const auto& [v0, p0] : best) {
        auto refined = nelder_mead(objective, p0, scale, options.nelder_mead_iterations);
        const double v = objective(refined);
        if (v < minval) { minval = v; argmin = refined; }
    }
    argmin[0] = std::clamp(argmin[0], 0.0, 1e6);
    argmin[1] = std::clamp(argmin[1], 0.0, 10.0);
    argmin[2] = std::clamp(argmin[2], 0.0, 0.9999);

    CaviarResult result;
    result.coef = argmin;
    result.objective = minval;
    result.forecast.method = Method::caviar;
    result.forecast.in_sample_q.resize(n);
    double v = eq * eq;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) v = argmin[0] + argmin[1] * series[t - 1] * series[t - 1] + argmin[2] * v;
        result.forecast.in_sample_q[t] = sign * std::sqrt(std::max(v, 0.0));
    }
    v = argmin[0] + argmin[1] * series[n - 1] * series[n - 1] + argmin[2] * v;
    result.forecast.next_q = sign * std::sqrt(std::max(v, 0.0));
    return result;
}

} // namespace garchqr
