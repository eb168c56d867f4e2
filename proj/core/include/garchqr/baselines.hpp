#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "garchqr/series.hpp"

namespace garchqr {

enum class Method {
    hybrid,
    qgarch1,
    qgarch2,
    caviar,
    riskmetrics,
};

Method method_from_name(const std::string& name);
const char* method_name(Method method);

struct BaselineForecast {
    Method method;
    std::vector<double> in_sample_q; // Q_tau(x_t | F_{t-1}) estimates, t = 1..n
    double next_q = 0.0;             // Q_tau(x_{n+1} | F_n)
    bool converged = true;           // CAViaR search only
};

/// RiskMetrics: fixed integrated-GARCH filter h_t = 0.06 x_{t-1}^2 + 0.94 h_{t-1}
/// with h_1 = x_1^2, quantile sqrt(h_t) * Phi^{-1}(tau). No estimation.
BaselineForecast riskmetrics(const ReturnSeries& series, double tau);

struct SieveConfig {
    /// Sieve ARCH order; 0 selects ceil(3 n^{1/4}). An explicit m = 0 is not
    /// representable here, so `intercept_only` covers the degenerate case.
    std::size_t m = 0;
    bool intercept_only = false;
    /// Final-stage model orders for the quantile regression on z_t.
    std::size_t p = 1;
    std::size_t q = 1;
    /// When true, the sieve quantile fit itself is inverse-transformed
    /// (no second stage); the default reruns the two-step estimation with
    /// sieve volatility proxies in place of the QMLE ones.
    bool direct = false;
};

/// Sieve-based estimators: quantile regression of T(x_t) on
/// (1, x^2_{t-1..t-m}) at the target level (single-tau) or at the 19 levels
/// i/20 combined by rank-one minimum distance (multi-tau), producing
/// volatility proxies that replace the initial QMLE estimates.
BaselineForecast qgarch_sieve(const ReturnSeries& series, double tau, const SieveConfig& config,
                              bool multi_tau);

struct CaviarOptions {
    std::size_t screen_points = 10000;
    std::uint64_t seed = 1;
    int nelder_mead_iterations = 500;
    std::optional<std::vector<double>> warm_start; // (a0, a1, a2)
};

struct CaviarResult {
    BaselineForecast forecast;
    std::vector<double> coef; // (a0, a1, a2)
    double objective = 0.0;
};

/// Indirect GARCH(1,1) CAViaR: q_t = sgn(tau - 1/2) sqrt(a0 + a1 x_{t-1}^2 + a2 q_{t-1}^2)
/// fitted by minimizing the check loss with a random screen plus Nelder-Mead.
CaviarResult caviar_indirect_garch(const ReturnSeries& series, double tau,
                                   const CaviarOptions& options = {});

} // namespace garchqr
