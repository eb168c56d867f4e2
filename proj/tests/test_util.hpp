#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "garchqr/garch.hpp"
#include "garchqr/linalg.hpp"
#include "garchqr/quantile_regression.hpp"
#include "garchqr/series.hpp"

namespace testutil {

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline garchqr::GarchParams garch11(double a0, double a1, double b1) {
    garchqr::GarchParams p;
    p.alpha0 = a0;
    p.alpha = {a1};
    p.beta = {b1};
    return p;
}

inline garchqr::GarchParams arch1(double a0, double a1) {
    garchqr::GarchParams p;
    p.alpha0 = a0;
    p.alpha = {a1};
    return p;
}

/// Brute-force weighted check-loss objective.
inline double qr_objective(const garchqr::QrProblem& problem, const std::vector<double>& coef) {
    double s = 0.0;
    for (std::size_t t = 0; t < problem.responses.size(); ++t) {
        const double fit = garchqr::dot(problem.design.row(t), coef);
        s += problem.weights[t] * garchqr::check_loss(problem.responses[t] - fit, problem.tau);
    }
    return s;
}

/// Exact-fit basis enumeration oracle: minimizes the objective over every
/// size-d subset of observations whose design rows are invertible.
inline double qr_enumeration_minimum(const garchqr::QrProblem& problem) {
    const std::size_t n = problem.design.rows();
    const std::size_t d = problem.design.cols();
    double best = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> comb(d);
    for (std::size_t k = 0; k < d; ++k) comb[k] = k;
    auto advance = [&]() {
        std::size_t k = d;
        while (k > 0) {
            --k;
            if (comb[k] + (d - k) < n) {
                ++comb[k];
                for (std::size_t j = k + 1; j < d; ++j) comb[j] = comb[j - 1] + 1;
                return true;
            }
        }
        return false;
    };
    do {
        garchqr::Matrix sub(d, d);
        std::vector<double> yb(d);
        for (std::size_t i = 0; i < d; ++i) {
            auto row = problem.design.row(comb[i]);
            for (std::size_t j = 0; j < d; ++j) sub(i, j) = row[j];
            yb[i] = problem.responses[comb[i]];
        }
        auto lu = garchqr::LuFactorization::compute(sub);
        if (!lu.singular()) {
            const auto coef = lu.solve(yb);
            best = std::min(best, qr_objective(problem, coef));
        }
    } while (advance());
    return best;
}

} // namespace testutil
