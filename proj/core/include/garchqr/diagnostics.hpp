#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "garchqr/bootstrap.hpp"
#include "garchqr/hybrid.hpp"
#include "garchqr/linalg.hpp"

namespace garchqr {

/// Weighted residuals eps_t = (y_t - theta_tau' z_t) / h_t with the sample
/// moments of |eps| used to scale the QACF.
struct WeightedResiduals {
    std::vector<double> eps_hat;
    double mu_a = 0.0;    // mean of |eps|
    double sigma2_a = 0.0; // n^{-1} sum (|eps| - mu)^2
};

WeightedResiduals weighted_residuals(const HybridFit& fit);

/// Residual quantile autocorrelations r_1..r_K:
///   r_k = [(tau - tau^2) sigma2]^{-1/2} n^{-1} sum_{t=k+1}^n psi_tau(eps_t) |eps_{t-k}|.
std::vector<double> qacf(const WeightedResiduals& residuals, double tau, std::size_t K);

/// Randomly weighted QACF of bootstrap residuals; sigma2_a comes from the
/// original residuals, not the replicate.
std::vector<double> weighted_qacf(std::span<const double> eps_star,
                                  std::span<const double> weights, double tau,
                                  double sigma2_a_original, std::size_t K);

struct QacfReport {
    std::vector<double> r;
    std::size_t K = 0;
    double q_stat = 0.0;
    Matrix sigma3_star;
    double p_value = 1.0;
    std::vector<CiInterval> per_lag_bounds; // 2.5th/97.5th percentiles of T_k / sqrt(n)
    bool ridged = false; // sigma3 inverse needed ridge regularization
};

/// Portmanteau statistic Q(K) = n R' (Sigma3*)^{-1} R with the bootstrap
/// covariance Sigma3* and a chi-squared(K) upper-tail p-value.
QacfReport portmanteau_test(const HybridFit& fit, const BootstrapEnsemble& ensemble,
                            std::size_t K);

} // namespace garchqr
