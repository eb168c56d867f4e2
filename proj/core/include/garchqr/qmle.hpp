#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "garchqr/garch.hpp"
#include "garchqr/linalg.hpp"
#include "garchqr/series.hpp"

namespace garchqr {

struct QmleOptions {
    double tol = 1e-8;          // relative objective change
    int max_iterations = 500;   // per start
    /// Optional per-observation weights (randomly weighted likelihood).
    std::vector<double> weights;
    /// When set, optimization starts only from this point (warm start);
    /// otherwise three canonical persistence levels are tried.
    std::optional<GarchParams> warm_start;
};

struct QmleFit {
    GarchParams theta_hat;
    double objective = 0.0;
    /// Per-observation terms x_t^2 / h_t + log h_t at theta_hat.
    std::vector<double> loglik_terms;
    /// J-tilde = n^{-1} sum h_t^{-2} (dh_t)(dh_t)'.
    Matrix j_tilde;
    /// Row t = (1 - x_t^2/h_t) h_t^{-1} dh_t/dtheta.
    Matrix score_path;
    /// Asymptotic sandwich standard errors (J^{-1} S J^{-1} / n).
    std::vector<double> std_errors;
    /// Fitted volatility path (with gradient) at theta_hat.
    VolatilityPath path;
    bool converged = false;
    int iterations = 0;
};

/// Gaussian quasi-likelihood objective sum_t [x_t^2/h_t(theta) + log h_t(theta)].
double qmle_objective(const GarchParams& params, const ReturnSeries& series,
                      const ThetaBox& box = {});

/// Minimizes the objective over the box by BFGS on log-parameters with
/// projection, multi-started from low/medium/high persistence points.
/// Non-convergence is reported through the flag; the best point found is
/// always returned.
QmleFit fit_qmle(const ReturnSeries& series, std::size_t p, std::size_t q,
                 const ThetaBox& box = {}, const QmleOptions& options = {});

} // namespace garchqr
