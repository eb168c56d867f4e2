#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "garchqr/linalg.hpp"
#include "garchqr/rng.hpp"
#include "garchqr/series.hpp"

namespace garchqr {

/// GARCH(p,q) coefficients theta = (alpha0, alpha_1..alpha_q, beta_1..beta_p).
struct GarchParams {
    double alpha0 = 0.0;
    std::vector<double> alpha; // ARCH coefficients, length q
    std::vector<double> beta;  // GARCH coefficients, length p

    std::size_t p() const { return beta.size(); }
    std::size_t q() const { return alpha.size(); }
    std::size_t dim() const { return 1 + alpha.size() + beta.size(); }

    double alpha_sum() const;
    double beta_sum() const;
    double persistence() const { return alpha_sum() + beta_sum(); }

    std::vector<double> to_vector() const;
    static GarchParams from_vector(std::span<const double> v, std::size_t p, std::size_t q);
};

/// Compact parameter set: componentwise box [w_lo, w_hi] plus the
/// beta-sum cap rho0 < 1.
struct ThetaBox {
    double w_lo = 1e-8;
    double w_hi = 10.0;
    double rho0 = 0.999;

    void validate(std::size_t p) const;

    /// Full membership: every component in [w_lo, w_hi] and sum(beta) <= rho0.
    bool contains(const GarchParams& params) const;
    /// Recursion admissibility: alpha0 >= w_lo keeps h_t bounded away from
    /// zero, but lag coefficients may be exactly zero (needed to express
    /// data-generating processes with gaps in the lag structure).
    bool admits_recursion(const GarchParams& params) const;
    /// Clips componentwise and rescales beta when sum(beta) > rho0.
    GarchParams project(GarchParams params) const;
};

/// i.i.d. innovation law with mean zero and variance one.
struct InnovationLaw {
    enum class Kind { standard_normal, student_t };

    Kind kind = Kind::standard_normal;
    double nu = 5.0; // Student only; variance standardized by sqrt((nu-2)/nu)

    static InnovationLaw normal() { return {Kind::standard_normal, 0.0}; }
    static InnovationLaw student(double nu);

    double sample(RngStream& rng) const;
    double cdf(double x) const;
    double quantile(double tau) const;
    const char* name() const;
};

/// Fitted volatility recursion output: h-tilde path and, when requested,
/// the recursive gradient d h_t / d theta (n x dim, pre-sample terms zero).
struct VolatilityPath {
    std::vector<double> h;
    Matrix gradient;
    double init_constant = 0.0;
    std::size_t p = 0;
    std::size_t q = 0;

    bool has_gradient() const { return !gradient.empty(); }
};

/// Volatility recursion with all pre-sample x^2 and h set to the sample
/// mean of x^2. Throws ConstraintViolation unless the box admits the
/// parameters (see ThetaBox::admits_recursion).
VolatilityPath volatility_path(const GarchParams& params, const ReturnSeries& series,
                               bool want_gradient, const ThetaBox& box = {});

/// Same recursion without any admissibility check; used where the caller
/// feeds perturbed parameter vectors that may fall outside the box.
VolatilityPath volatility_path_unchecked(const GarchParams& params, const ReturnSeries& series,
                                         bool want_gradient);

/// Row t is z_t = (1, x^2_{t-1..t-q}, h_{t-1..t-p}); pre-sample entries use
/// the same initialization constant as the recursion.
Matrix regressor_matrix(const VolatilityPath& path, const ReturnSeries& series);

/// z_{n+1}, assembled from the last q observations and last p fitted values.
std::vector<double> regressor_next(const VolatilityPath& path, const ReturnSeries& series);

struct SimulatedSeries {
    ReturnSeries returns;
    std::vector<double> volatility; // true h_1..h_n
    double next_volatility = 0.0;   // true h_{n+1}
};

/// Draws burn_in + n observations from the exact recursion, started at the
/// unconditional variance when persistence < 1 (alpha0 otherwise), and
/// discards the burn-in. Deterministic given the seed.
SimulatedSeries simulate_garch(const GarchParams& params, const InnovationLaw& law,
                               std::size_t n, std::size_t burn_in, std::uint64_t seed);

inline constexpr std::size_t kDefaultBurnIn = 500;

} // namespace garchqr
