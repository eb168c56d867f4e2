#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "garchqr/garch.hpp"
#include "garchqr/linalg.hpp"
#include "garchqr/qmle.hpp"
#include "garchqr/quantile_regression.hpp"
#include "garchqr/series.hpp"

namespace garchqr {

/// Quantile-regression coefficients on the transformed model; the vector
/// estimates b_tau * theta where b_tau = T(Q_{tau,eta}).
struct QuantileParams {
    std::vector<double> theta_tau;
    double tau = 0.0;
    bool weighted = true;
};

/// Everything produced by the two-stage fit, kept together because the
/// bootstrap and the diagnostics both reread the same ingredients.
struct HybridFit {
    std::size_t p = 0;
    std::size_t q = 0;
    std::optional<QmleFit> qmle;   // absent when volatilities were supplied
    VolatilityPath vol_path;       // h-tilde used in the quantile stage
    QuantileParams qparams;
    Matrix regressors;             // rows z_t
    std::vector<double> responses; // y_t = T(x_t)
    std::vector<double> qr_weights;
    std::vector<double> qr_residuals; // y - theta_tau' z, basis entries exactly 0
    std::vector<std::size_t> qr_basis;
    std::vector<double> in_sample_q;  // Q_tau(x_t | F_{t-1}) estimates
    std::vector<double> z_next;       // z_{n+1}
    double next_q = 0.0;

    std::size_t n() const { return responses.size(); }
    std::size_t dim() const { return 1 + p + q; }
};

/// Steps E1-E3: QMLE volatilities, weighted (1/h) or unweighted quantile
/// regression of T(x_t) on z_t, then inverse-transformed quantile estimates.
HybridFit fit_hybrid(const ReturnSeries& series, std::size_t p, std::size_t q, double tau,
                     bool weighted = true, const ThetaBox& box = {},
                     const QmleOptions& qmle_options = {});

/// Same quantile stage with caller-supplied volatilities (no QMLE step).
HybridFit fit_hybrid_with_volatility(const ReturnSeries& series, std::size_t p, std::size_t q,
                                     double tau, bool weighted, std::vector<double> volatility,
                                     double presample_value);

/// One-step-ahead conditional quantile of x_{n+1}.
double forecast_next(const HybridFit& fit);

} // namespace garchqr
