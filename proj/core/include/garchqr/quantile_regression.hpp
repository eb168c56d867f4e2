#pragma once

#include <cstddef>
#include <vector>

#include "garchqr/linalg.hpp"

namespace garchqr {

/// Check loss rho_tau(u) = u (tau - 1{u<0}).
double check_loss(double u, double tau);
/// Quantile score psi_tau(u) = tau - 1{u<0}; psi_tau(0) = tau.
double quantile_score(double u, double tau);

struct QrProblem {
    std::vector<double> responses; // y_1..y_n
    Matrix design;                 // n x d, rows z_t
    std::vector<double> weights;   // strictly positive
    double tau = 0.5;
};

enum class QrStatus {
    optimal,
    degenerate_optimal, // optimum reached on a flat face or with extra zero residuals
};

struct QrSolution {
    std::vector<double> coef;
    double objective = 0.0;
    std::vector<std::size_t> active_basis; // d interpolated observation indices, ascending
    QrStatus status = QrStatus::optimal;
    /// y - X coef with the basis entries set to exactly zero, so downstream
    /// sign logic never sees rounding dust at interpolated points.
    std::vector<double> residuals;
};

/// Exact weighted linear quantile regression
///
///     minimize sum_t w_t rho_tau(y_t - coef' z_t)
///
/// by exterior-point descent over exact-fit vertices: a basis of d
/// observations is interpolated, edge directions are scored by one-sided
/// directional derivatives, and a weighted-median line search walks to the
/// next vertex. Ties and flat segments resolve deterministically by taking
/// the maximal step, and at a flat optimum the solution slides to the
/// lexicographically largest optimal vertex, so repeated runs (and runs
/// across platforms) return identical coefficients.
///
/// Throws SolverError on rank-deficient designs, naming dependent columns.
QrSolution solve_quantile_regression(const QrProblem& problem);

} // namespace garchqr
