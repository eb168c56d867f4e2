#include "garchqr/hybrid.hpp"

#include <cmath>
#include <stdexcept>

#include "garchqr/errors.hpp"

namespace garchqr {

namespace {

void run_quantile_stage(HybridFit& fit, const ReturnSeries& series, double tau, bool weighted) {
    const std::size_t n = series.size();
    fit.responses = series.transformed();
    fit.regressors = regressor_matrix(fit.vol_path, series);

    QrProblem problem;
    problem.responses = fit.responses;
    problem.design = fit.regressors;
    problem.tau = tau;
    problem.weights.resize(n);
    for (std::size_t t = 0; t < n; ++t)
        problem.weights[t] = weighted ? 1.0 / fit.vol_path.h[t] : 1.0;

    auto sol = solve_quantile_regression(problem);
    fit.qparams = QuantileParams{std::move(sol.coef), tau, weighted};
    fit.qr_weights = std::move(problem.weights);
    fit.qr_residuals = std::move(sol.residuals);
    fit.qr_basis = std::move(sol.active_basis);

    fit.in_sample_q.resize(n);
    for (std::size_t t = 0; t < n; ++t)
        fit.in_sample_q[t] = signed_sqrt(dot(fit.regressors.row(t), fit.qparams.theta_tau));

    fit.z_next = regressor_next(fit.vol_path, series);
    fit.next_q = signed_sqrt(dot(fit.z_next, fit.qparams.theta_tau));
}

} // namespace

HybridFit fit_hybrid(const ReturnSeries& series, std::size_t p, std::size_t q, double tau,
                     bool weighted, const ThetaBox& box, const QmleOptions& qmle_options) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("fit_hybrid: tau must be in (0,1)");
    HybridFit fit;
    fit.p = p;
    fit.q = q;
    fit.qmle = fit_qmle(series, p, q, box, qmle_options);
    fit.vol_path = fit.qmle->path;
    run_quantile_stage(fit, series, tau, weighted);
    return fit;
}

HybridFit fit_hybrid_with_volatility(const ReturnSeries& series, std::size_t p, std::size_t q,
                                     double tau, bool weighted, std::vector<double> volatility,
                                     double presample_value) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("fit_hybrid: tau must be in (0,1)");
    if (volatility.size() != series.size())
        throw std::invalid_argument("fit_hybrid: volatility length mismatch");
    for (double h : volatility)
        if (!(h > 0.0)) throw ConstraintViolation("fit_hybrid: supplied volatilities must be positive");
    HybridFit fit;
    fit.p = p;
    fit.q = q;
    fit.vol_path.h = std::move(volatility);
    fit.vol_path.init_constant = presample_value;
    fit.vol_path.p = p;
    fit.vol_path.q = q;
    run_quantile_stage(fit, series, tau, weighted);
    return fit;
}

double forecast_next(const HybridFit& fit) {
    return fit.next_q;
}

} // namespace garchqr
