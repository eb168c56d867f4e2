#include "garchqr/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "garchqr/diagnostics.hpp"
#include "garchqr/errors.hpp"
#include "garchqr/parallel.hpp"
#include "garchqr/stats.hpp"

namespace garchqr {

namespace {

// Mammen's two-point distribution: (3-sqrt5)/2 with probability
// (sqrt5+1)/(2 sqrt5), else (3+sqrt5)/2; mean 1, variance 1.
constexpr double kSqrt5 = 2.2360679774997896964091736687747;
constexpr double kMammenLow = (3.0 - kSqrt5) / 2.0;
constexpr double kMammenHigh = (3.0 + kSqrt5) / 2.0;
constexpr double kMammenLowProb = (kSqrt5 + 1.0) / (2.0 * kSqrt5);

} // namespace

WeightLaw WeightLaw::from_name(const std::string& name) {
    if (name == "exponential" || name == "w1") return {Kind::exponential};
    if (name == "rademacher" || name == "w2") return {Kind::rademacher};
    if (name == "mammen" || name == "w3") return {Kind::mammen};
    throw std::invalid_argument("unknown weight law: " + name);
}

const char* WeightLaw::name() const {
    switch (kind) {
        case Kind::exponential: return "exponential";
        case Kind::rademacher: return "rademacher";
        case Kind::mammen: return "mammen";
    }
    return "?";
}

void WeightLaw::sample(RngStream& rng, std::span<double> out) const {
    switch (kind) {
        case Kind::exponential:
            for (auto& w : out) w = rng.next_exponential();
            break;
        case Kind::rademacher:
            for (auto& w : out) w = rng.next_double() < 0.5 ? 0.0 : 2.0;
            break;
        case Kind::mammen:
            for (auto& w : out) w = rng.next_double() < kMammenLowProb ? kMammenLow : kMammenHigh;
            break;
    }
}

std::vector<double> draw_weights(const WeightLaw& law, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("draw_weights: n must be positive");
    RngStream rng(seed);
    std::vector<double> w(n);
    law.sample(rng, w);
    return w;
}

std::vector<double> theta_star_update(const QmleFit& fit, const ReturnSeries& series,
                                      std::span<const double> weights) {
    const std::size_t n = series.size();
    const std::size_t dim = fit.theta_hat.dim();
    if (weights.size() != n) throw std::invalid_argument("theta_star_update: weight length mismatch");

    const auto lu = LuFactorization::compute(fit.j_tilde);
    if (lu.singular() || lu.pivot_ratio() > 1e12)
        throw SolverError("theta_star_update: J-tilde is numerically singular; "
                          "try a longer series or a lower model order");

    std::vector<double> v(dim, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const double c = weights[t] - 1.0;
        if (c == 0.0) continue;
        auto srow = fit.score_path.row(t);
        for (std::size_t k = 0; k < dim; ++k) v[k] += c * srow[k];
    }
    for (auto& x : v) x /= static_cast<double>(n);
    const auto step = lu.solve(v);

    auto theta = fit.theta_hat.to_vector();
    for (std::size_t k = 0; k < dim; ++k) theta[k] -= step[k];
    return theta;
}

GarchParams theta_star_full_qmle(const ReturnSeries& series, const QmleFit& fit,
                                 std::span<const double> weights, const ThetaBox& box) {
    QmleOptions options;
    options.weights.assign(weights.begin(), weights.end());
    options.warm_start = fit.theta_hat;
    options.tol = 1e-10;
    const auto wfit = fit_qmle(series, fit.theta_hat.p(), fit.theta_hat.q(), box, options);
    return wfit.theta_hat;
}

namespace {

struct ReplicateContext {
    std::vector<double> base_r; // QACF of the original fit
    double sigma2_a = 0.0;
};

ReplicateContext make_context(const HybridFit& fit, std::size_t K) {
    const auto residuals = weighted_residuals(fit);
    return ReplicateContext{qacf(residuals, fit.qparams.tau, K), residuals.sigma2_a};
}

BootstrapReplicate replicate_impl(const HybridFit& fit, const ReturnSeries& series,
                                  std::span<const double> weights, std::size_t K,
                                  const ReplicateContext& ctx) {
    if (!fit.qmle)
        throw std::invalid_argument("bootstrap replicate: fit carries no QMLE stage");
    const std::size_t n = series.size();
    if (weights.size() != n) throw std::invalid_argument("bootstrap replicate: weight length mismatch");
    const std::size_t dim = fit.dim();

    BootstrapReplicate rep;
    rep.theta_star = theta_star_update(*fit.qmle, series, weights);

    const auto params_star = GarchParams::from_vector(rep.theta_star, fit.p, fit.q);
    const auto path_star = volatility_path_unchecked(params_star, series, false);
    for (double h : path_star.h)
        if (!std::isfinite(h))
            throw SolverError("bootstrap replicate: exploded volatility rebuild");

    const auto zstar = regressor_matrix(path_star, series);

    // Randomly weighted quantile regression; weight = w_t x original QR
    // weight, with zero-weight rows dropped (they carry no influence).
    std::vector<std::size_t> kept;
    kept.reserve(n);
    for (std::size_t t = 0; t < n; ++t)
        if (weights[t] > 0.0) kept.push_back(t);
    if (kept.size() < dim)
        throw SolverError("bootstrap replicate: too few nonzero weights");

    QrProblem problem;
    problem.tau = fit.qparams.tau;
    problem.responses.resize(kept.size());
    problem.weights.resize(kept.size());
    problem.design = Matrix(kept.size(), dim);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const std::size_t t = kept[i];
        problem.responses[i] = fit.responses[t];
        problem.weights[i] = weights[t] * fit.qr_weights[t];
        auto src = zstar.row(t);
        auto dst = problem.design.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    auto sol = solve_quantile_regression(problem);
    rep.theta_tau_star = sol.coef;

    const double sqrt_n = std::sqrt(static_cast<double>(n));
    rep.e_stat.resize(dim);
    for (std::size_t k = 0; k < dim; ++k)
        rep.e_stat[k] = sqrt_n * (rep.theta_tau_star[k] - fit.qparams.theta_tau[k]);

    const auto znext = regressor_next(path_star, series);
    rep.q_stat = signed_sqrt(dot(znext, rep.theta_tau_star));

    // Residuals against the replicate design but the ORIGINAL volatilities,
    // with interpolated rows zeroed exactly.
    std::vector<double> eps_star(n);
    for (std::size_t t = 0; t < n; ++t)
        eps_star[t] = (fit.responses[t] - dot(zstar.row(t), rep.theta_tau_star)) / fit.vol_path.h[t];
    for (std::size_t idx : sol.active_basis) eps_star[kept[idx]] = 0.0;

    const auto rstar = weighted_qacf(eps_star, weights, fit.qparams.tau, ctx.sigma2_a, K);
    rep.t_stat.resize(K);
    for (std::size_t k = 0; k < K; ++k) rep.t_stat[k] = sqrt_n * (rstar[k] - ctx.base_r[k]);
    return rep;
}

} // namespace

BootstrapReplicate make_replicate(const HybridFit& fit, const ReturnSeries& series,
                                  std::span<const double> weights, std::size_t K) {
    return replicate_impl(fit, series, weights, K, make_context(fit, K));
}

BootstrapEnsemble run_ensemble(const ReturnSeries& series, const HybridFit& fit, std::size_t B,
                               const WeightLaw& law, std::size_t K, std::uint64_t seed,
                               int workers) {
    if (B < 2) throw std::invalid_argument("run_ensemble: need B >= 2");
    const std::size_t n = series.size();
    const auto ctx = make_context(fit, K);

    BootstrapEnsemble ensemble;
    ensemble.B = B;
    ensemble.seed = seed;
    ensemble.law = law;
    ensemble.K = K;
    ensemble.n = n;

    std::vector<BootstrapReplicate> slots(B);
    std::vector<std::string> errors(B);
    parallel_for(B, [&](std::size_t i) {
        RngStream rng(seed, i + 1);
        std::vector<double> w(n);
        law.sample(rng, w);
        try {
            slots[i] = replicate_impl(fit, series, w, K, ctx);
        } catch (const std::exception& e) {
            errors[i] = std::string("replicate ") + std::to_string(i) + ": " + e.what();
        }
    }, workers);

    for (std::size_t i = 0; i < B; ++i) {
        if (errors[i].empty())
            ensemble.replicates.push_back(std::move(slots[i]));
        else
            ensemble.failures.emplace_back(i, errors[i]);
    }
    if (100 * ensemble.failures.size() > B) {
        std::string msg = "run_ensemble: too many failed replicates (" +
                          std::to_string(ensemble.failures.size()) + "/" + std::to_string(B) + ")";
        if (!ensemble.failures.empty()) msg += "; first: " + ensemble.failures.front().second;
        throw SolverError(msg);
    }
    return ensemble;
}

BootstrapSummary::BootstrapSummary(const BootstrapEnsemble& ensemble, const HybridFit& fit) {
    const std::size_t B = ensemble.replicates.size();
    if (B < 2) throw std::invalid_argument("summarize: need at least two replicates");
    const std::size_t dim = fit.dim();
    const double sqrt_n = std::sqrt(static_cast<double>(ensemble.n));

    Matrix emat(B, dim);
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t k = 0; k < dim; ++k) emat(b, k) = ensemble.replicates[b].e_stat[k];
    e_cov_ = sample_covariance(emat);

    asd_.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) asd_[k] = std::sqrt(std::max(e_cov_(k, k), 0.0)) / sqrt_n;

    theta_star_sorted_.assign(dim, std::vector<double>(B));
    for (std::size_t k = 0; k < dim; ++k) {
        for (std::size_t b = 0; b < B; ++b)
            theta_star_sorted_[k][b] = ensemble.replicates[b].theta_tau_star[k];
        std::sort(theta_star_sorted_[k].begin(), theta_star_sorted_[k].end());
    }
    q_sorted_.resize(B);
    for (std::size_t b = 0; b < B; ++b) q_sorted_[b] = ensemble.replicates[b].q_stat;
    std::sort(q_sorted_.begin(), q_sorted_.end());
}

CiInterval BootstrapSummary::parameter_ci(std::size_t component, double level) const {
    const double a = (1.0 - level) / 2.0;
    const auto& s = theta_star_sorted_.at(component);
    return {stats::quantile_type7_sorted(s, a), stats::quantile_type7_sorted(s, 1.0 - a)};
}

CiInterval BootstrapSummary::next_quantile_ci(double level) const {
    const double a = (1.0 - level) / 2.0;
    return {stats::quantile_type7_sorted(q_sorted_, a),
            stats::quantile_type7_sorted(q_sorted_, 1.0 - a)};
}

BootstrapSummary summarize(const BootstrapEnsemble& ensemble, const HybridFit& fit) {
    return BootstrapSummary(ensemble, fit);
}

} // namespace garchqr
