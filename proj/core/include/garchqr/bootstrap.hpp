#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "garchqr/hybrid.hpp"
#include "garchqr/linalg.hpp"
#include "garchqr/qmle.hpp"
#include "garchqr/series.hpp"

namespace garchqr {

/// Random-weight laws with mean one and variance one.
struct WeightLaw {
    enum class Kind {
        exponential, // W1: standard exponential
        rademacher,  // W2: 0 or 2 with probability 1/2 each
        mammen,      // W3: Mammen's two-point distribution
    };

    Kind kind = Kind::exponential;

    static WeightLaw from_name(const std::string& name);
    const char* name() const;
    void sample(RngStream& rng, std::span<double> out) const;
};

/// i.i.d. draws, deterministic given (seed).
std::vector<double> draw_weights(const WeightLaw& law, std::size_t n, std::uint64_t seed);

/// One-step sample-averaging update replacing the weighted QMLE
/// re-optimization:
///   theta* = theta - J^{-1} n^{-1} sum_t (w_t - 1) score_t.
/// Throws SolverError when J-tilde is numerically singular.
std::vector<double> theta_star_update(const QmleFit& fit, const ReturnSeries& series,
                                      std::span<const double> weights);

/// Full weighted-QMLE path (the optimization the averaging step replaces);
/// kept as a validation mode, warm-started at theta-hat.
GarchParams theta_star_full_qmle(const ReturnSeries& series, const QmleFit& fit,
                                 std::span<const double> weights, const ThetaBox& box = {});

struct BootstrapReplicate {
    std::vector<double> theta_star;     // updated QMLE-scale parameters
    std::vector<double> theta_tau_star; // re-solved quantile coefficients
    std::vector<double> e_stat;         // sqrt(n) (theta_tau_star - theta_tau)
    double q_stat = 0.0;                // T^{-1}(theta_tau_star' z*_{n+1})
    std::vector<double> t_stat;         // sqrt(n) (R* - R), length K
};

struct BootstrapEnsemble {
    std::vector<BootstrapReplicate> replicates;
    std::size_t B = 0;
    std::uint64_t seed = 0;
    WeightLaw law;
    std::size_t K = 0;
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::string>> failures;
};

/// One mixed-bootstrap replicate: B1' averaging update, volatility rebuild,
/// randomly weighted quantile regression (zero-weight rows dropped), and the
/// E/Q/T statistics.
BootstrapReplicate make_replicate(const HybridFit& fit, const ReturnSeries& series,
                                  std::span<const double> weights, std::size_t K);

/// B replicates with per-replicate weight streams split off (seed, index),
/// collected in index order so parallel execution cannot change results.
/// Throws when more than 1% of replicates fail.
BootstrapEnsemble run_ensemble(const ReturnSeries& series, const HybridFit& fit, std::size_t B,
                               const WeightLaw& law, std::size_t K, std::uint64_t seed,
                               int workers = 0);

struct CiInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Percentile summaries of an ensemble (type-7 interpolation throughout).
class BootstrapSummary {
public:
    BootstrapSummary(const BootstrapEnsemble& ensemble, const HybridFit& fit);

    /// Sample covariance of the E statistics (asymptotic covariance of
    /// sqrt(n)(theta_tau_hat - theta_tau0)).
    const Matrix& e_covariance() const { return e_cov_; }
    /// Bootstrap standard deviation of each quantile coefficient.
    const std::vector<double>& asd() const { return asd_; }

    CiInterval parameter_ci(std::size_t component, double level) const;
    CiInterval next_quantile_ci(double level) const;

private:
    Matrix e_cov_;
    std::vector<double> asd_;
    std::vector<std::vector<double>> theta_star_sorted_; // per component
    std::vector<double> q_sorted_;
};

BootstrapSummary summarize(const BootstrapEnsemble& ensemble, const HybridFit& fit);

} // namespace garchqr
