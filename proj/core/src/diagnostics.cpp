#include "garchqr/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "garchqr/errors.hpp"
#include "garchqr/stats.hpp"

namespace garchqr {

WeightedResiduals weighted_residuals(const HybridFit& fit) {
    const std::size_t n = fit.n();
    WeightedResiduals res;
    res.eps_hat.resize(n);
    for (std::size_t t = 0; t < n; ++t) res.eps_hat[t] = fit.qr_residuals[t] / fit.vol_path.h[t];
    double mu = 0.0;
    for (double e : res.eps_hat) mu += std::abs(e);
    mu /= static_cast<double>(n);
    double s2 = 0.0;
    for (double e : res.eps_hat) {
        const double d = std::abs(e) - mu;
        s2 += d * d;
    }
    s2 /= static_cast<double>(n);
    res.mu_a = mu;
    res.sigma2_a = s2;
    if (!(res.sigma2_a > 0.0))
        throw SolverError("diagnostics: residuals have zero dispersion (degenerate fit)");
    return res;
}

std::vector<double> qacf(const WeightedResiduals& residuals, double tau, std::size_t K) {
    const std::size_t n = residuals.eps_hat.size();
    if (K == 0 || 4 * K >= n) throw std::invalid_argument("qacf: need 0 < K < n/4");
    const double scale = 1.0 / std::sqrt((tau - tau * tau) * residuals.sigma2_a);
    std::vector<double> r(K, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
        double s = 0.0;
        for (std::size_t t = k; t < n; ++t)
            s += quantile_score(residuals.eps_hat[t], tau) * std::abs(residuals.eps_hat[t - k]);
        r[k - 1] = scale * s / static_cast<double>(n); // n, not n-k
    }
    return r;
}

std::vector<double> weighted_qacf(std::span<const double> eps_star,
                                  std::span<const double> weights, double tau,
                                  double sigma2_a_original, std::size_t K) {
    const std::size_t n = eps_star.size();
    if (weights.size() != n) throw std::invalid_argument("weighted_qacf: weight length mismatch");
    const double scale = 1.0 / std::sqrt((tau - tau * tau) * sigma2_a_original);
    std::vector<double> r(K, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
        double s = 0.0;
        for (std::size_t t = k; t < n; ++t)
            s += weights[t] * quantile_score(eps_star[t], tau) * std::abs(eps_star[t - k]);
        r[k - 1] = scale * s / static_cast<double>(n);
    }
    return r;
}

QacfReport portmanteau_test(const HybridFit& fit, const BootstrapEnsemble& ensemble,
                            std::size_t K) {
    if (ensemble.K != K)
        throw std::invalid_argument("portmanteau_test: ensemble carries a different lag count");
    const std::size_t B = ensemble.replicates.size();
    if (B < 2) throw std::invalid_argument("portmanteau_test: need at least two replicates");
    const std::size_t n = fit.n();

    QacfReport report;
    report.K = K;
    const auto residuals = weighted_residuals(fit);
    report.r = qacf(residuals, fit.qparams.tau, K);

    Matrix tmat(B, K);
    for (std::size_t b = 0; b < B; ++b) {
        const auto& ts = ensemble.replicates[b].t_stat;
        if (ts.size() != K) throw std::invalid_argument("portmanteau_test: t_stat length mismatch");
        for (std::size_t k = 0; k < K; ++k) tmat(b, k) = ts[k];
    }
    report.sigma3_star = sample_covariance(tmat);

    // Invert Sigma3*, ridging on numerical singularity.
    Matrix sigma = report.sigma3_star;
    double trace = 0.0;
    for (std::size_t k = 0; k < K; ++k) trace += sigma(k, k);
    double lambda = 1e-8 * trace / static_cast<double>(K);
    auto lu = LuFactorization::compute(sigma);
    for (int attempt = 0; (lu.singular() || lu.pivot_ratio() > 1e12) && attempt < 8; ++attempt) {
        report.ridged = true;
        for (std::size_t k = 0; k < K; ++k) sigma(k, k) = report.sigma3_star(k, k) + lambda;
        lu = LuFactorization::compute(sigma);
        lambda *= 10.0;
    }
    if (lu.singular())
        throw SolverError("portmanteau_test: Sigma3* singular even after ridging");

    const auto solved = lu.solve(report.r);
    report.q_stat = static_cast<double>(n) * dot(report.r, solved);
    report.p_value = stats::chi_squared_upper_tail(static_cast<double>(K), report.q_stat);

    const double sqrt_n = std::sqrt(static_cast<double>(n));
    report.per_lag_bounds.resize(K);
    std::vector<double> col(B);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t b = 0; b < B; ++b) col[b] = tmat(b, k);
        report.per_lag_bounds[k] = CiInterval{
            stats::quantile_type7(col, 0.025) / sqrt_n,
            stats::quantile_type7(col, 0.975) / sqrt_n,
        };
    }
    return report;
}

} // namespace garchqr
