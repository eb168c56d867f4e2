#include "garchqr/qmle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "garchqr/errors.hpp"

namespace garchqr {

namespace {

double objective_terms(const VolatilityPath& path, const ReturnSeries& series,
                       const std::vector<double>& weights, std::vector<double>* terms) {
    const std::size_t n = series.size();
    double total = 0.0;
    if (terms) terms->resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double h = path.h[t];
        const double term = series[t] * series[t] / h + std::log(h);
        if (terms) (*terms)[t] = term;
        total += weights.empty() ? term : weights[t] * term;
    }
    return total;
}

std::vector<double> objective_gradient(const VolatilityPath& path, const ReturnSeries& series,
                                       const std::vector<double>& weights) {
    const std::size_t n = series.size();
    const std::size_t dim = path.gradient.cols();
    std::vector<double> g(dim, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const double h = path.h[t];
        const double c = (1.0 - series[t] * series[t] / h) / h *
                         (weights.empty() ? 1.0 : weights[t]);
        auto dh = path.gradient.row(t);
        for (std::size_t k = 0; k < dim; ++k) g[k] += c * dh[k];
    }
    return g;
}

struct Evaluated {
    GarchParams params;
    double value;
    std::vector<double> grad_log; // gradient in log-parameter space
};

class BfgsRun {
public:
    BfgsRun(const ReturnSeries& series, std::size_t p, std::size_t q, const ThetaBox& box,
            const QmleOptions& options)
        : series_(series), p_(p), q_(q), box_(box), options_(options) {}

    double value_at(const GarchParams& params) const {
        const auto path = volatility_path(params, series_, false, box_);
        return objective_terms(path, series_, options_.weights, nullptr);
    }

    Evaluated evaluate(const GarchParams& params) const {
        const auto path = volatility_path(params, series_, true, box_);
        Evaluated e;
        e.params = params;
        e.value = objective_terms(path, series_, options_.weights, nullptr);
        auto g = objective_gradient(path, series_, options_.weights);
        const auto theta = params.to_vector();
        e.grad_log.resize(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) e.grad_log[k] = g[k] * theta[k];
        return e;
    }

    GarchParams from_log(const std::vector<double>& phi) const {
        const double lo = std::log(box_.w_lo), hi = std::log(box_.w_hi);
        std::vector<double> theta(phi.size());
        for (std::size_t k = 0; k < phi.size(); ++k) {
            const double clamped = std::isfinite(phi[k]) ? std::clamp(phi[k], lo, hi)
                                                         : (phi[k] > 0.0 ? hi : lo);
            theta[k] = std::exp(std::isnan(phi[k]) ? lo : clamped);
        }
        return box_.project(GarchParams::from_vector(theta, p_, q_));
    }

    static std::vector<double> to_log(const GarchParams& params) {
        auto v = params.to_vector();
        for (auto& x : v) x = std::log(x);
        return v;
    }

    /// Returns (point, value, converged, iterations).
    std::tuple<GarchParams, double, bool, int> minimize(const GarchParams& start) const {
        const std::size_t dim = 1 + p_ + q_;
        std::vector<double> phi = to_log(box_.project(start));
        Evaluated cur = evaluate(from_log(phi));
        Matrix hinv = Matrix::identity(dim);
        bool converged = false;
        int it = 0;
        auto all_finite = [](const std::vector<double>& v) {
            for (double x : v)
                if (!std::isfinite(x)) return false;
            return true;
        };
        for (; it < options_.max_iterations; ++it) {
            auto dir = matvec(hinv, cur.grad_log);
            for (auto& x : dir) x = -x;
            double slope = dot(dir, cur.grad_log);
            if (!(slope < 0.0) || !all_finite(dir)) { // reset stale curvature
                hinv = Matrix::identity(dim);
                for (std::size_t k = 0; k < dim; ++k) dir[k] = -cur.grad_log[k];
                slope = dot(dir, cur.grad_log);
                if (!(slope < 0.0)) { converged = true; break; }
            }

            double alpha = 1.0;
            std::vector<double> phi_new(dim);
            GarchParams cand;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                for (std::size_t k = 0; k < dim; ++k) phi_new[k] = phi[k] + alpha * dir[k];
                cand = from_log(phi_new);
                const double v = value_at(cand);
                if (v <= cur.value + 1e-4 * alpha * slope) {
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) { converged = true; break; } // no progress at machine scale

            Evaluated next = evaluate(cand);
            // Projection can modify the point: measure the step actually taken.
            const auto phi_taken = to_log(next.params);
            std::vector<double> s(dim), yv(dim);
            for (std::size_t k = 0; k < dim; ++k) {
                s[k] = phi_taken[k] - phi[k];
                yv[k] = next.grad_log[k] - cur.grad_log[k];
            }
            const double sy = dot(s, yv);
            if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(yv, yv)) && sy > 1e-300 &&
                all_finite(yv)) {
                // BFGS inverse update: H <- (I - s y'/sy) H (I - y s'/sy) + s s'/sy
                const auto hy = matvec(hinv, yv);
                const double yhy = dot(yv, hy);
                const double c1 = (sy + yhy) / (sy * sy);
                if (std::isfinite(c1)) {
                    for (std::size_t a = 0; a < dim; ++a)
                        for (std::size_t b = 0; b < dim; ++b)
                            hinv(a, b) += c1 * s[a] * s[b] - (hy[a] * s[b] + s[a] * hy[b]) / sy;
                }
            }

            const double change = std::abs(cur.value - next.value);
            phi = phi_taken;
            cur = std::move(next);
            if (change <= options_.tol * (1.0 + std::abs(cur.value))) {
                converged = true;
                ++it;
                break;
            }
        }
        return {cur.params, cur.value, converged, it};
    }

private:
    const ReturnSeries& series_;
    std::size_t p_, q_;
    const ThetaBox& box_;
    const QmleOptions& options_;
};

std::vector<GarchParams> canonical_starts(const ReturnSeries& series, std::size_t p, std::size_t q,
                                          const ThetaBox& box) {
    const double v = series.mean_square();
    // low / medium / high persistence; alpha0 scaled so the implied
    // unconditional variance matches the sample mean square
    const double arch_share[] = {0.05, 0.10, 0.10};
    const double garch_share[] = {0.05, 0.60, 0.85};
    std::vector<GarchParams> starts;
    for (int s = 0; s < 3; ++s) {
        GarchParams g;
        double persistence = 0.0;
        g.alpha.assign(q, 0.0);
        g.beta.assign(p, 0.0);
        if (q > 0) {
            const double total = arch_share[s] + (p == 0 ? garch_share[s] : 0.0);
            for (auto& a : g.alpha) a = total / static_cast<double>(q);
            persistence += total;
        }
        if (p > 0) {
            const double total = garch_share[s] + (q == 0 ? arch_share[s] : 0.0);
            for (auto& b : g.beta) b = total / static_cast<double>(p);
            persistence += total;
        }
        g.alpha0 = std::max(v * (1.0 - persistence), box.w_lo * 2.0);
        starts.push_back(box.project(g));
        if (p == 0 && q == 0) break; // constant volatility: one start suffices
    }
    return starts;
}

} // namespace

double qmle_objective(const GarchParams& params, const ReturnSeries& series, const ThetaBox& box) {
    const auto path = volatility_path(params, series, false, box);
    std::vector<double> no_weights;
    return objective_terms(path, series, no_weights, nullptr);
}

QmleFit fit_qmle(const ReturnSeries& series, std::size_t p, std::size_t q, const ThetaBox& box,
                 const QmleOptions& options) {
    box.validate(p);
    const std::size_t dim = 1 + p + q;
    if (series.size() <= 10 * dim)
        throw ConstraintViolation("fit_qmle: need n > 10 (p+q+1) observations");
    if (!options.weights.empty() && options.weights.size() != series.size())
        throw std::invalid_argument("fit_qmle: weight length mismatch");

    BfgsRun run(series, p, q, box, options);
    std::vector<GarchParams> starts;
    if (options.warm_start) {
        starts.push_back(*options.warm_start);
    } else {
        starts = canonical_starts(series, p, q, box);
    }

    GarchParams best;
    double best_value = std::numeric_limits<double>::infinity();
    bool best_converged = false;
    int total_iterations = 0;
    for (const auto& s : starts) {
        auto [point, value, conv, iters] = run.minimize(s);
        total_iterations += iters;
        if (value < best_value) {
            best_value = value;
            best = point;
            best_converged = conv;
        }
    }

    QmleFit fit;
    fit.theta_hat = best;
    fit.converged = best_converged;
    fit.iterations = total_iterations;
    fit.path = volatility_path(best, series, true, box);
    fit.objective = objective_terms(fit.path, series, options.weights, &fit.loglik_terms);

    const std::size_t n = series.size();
    fit.j_tilde = Matrix(dim, dim, 0.0);
    fit.score_path = Matrix(n, dim, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const double h = fit.path.h[t];
        auto dh = fit.path.gradient.row(t);
        const double sc = (1.0 - series[t] * series[t] / h) / h;
        auto srow = fit.score_path.row(t);
        for (std::size_t a = 0; a < dim; ++a) {
            srow[a] = sc * dh[a];
            for (std::size_t b = a; b < dim; ++b) fit.j_tilde(a, b) += dh[a] * dh[b] / (h * h);
        }
    }
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = a; b < dim; ++b) {
            fit.j_tilde(a, b) /= static_cast<double>(n);
            fit.j_tilde(b, a) = fit.j_tilde(a, b);
        }

    // Sandwich standard errors from J-tilde and the score outer product.
    Matrix smat(dim, dim, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        auto srow = fit.score_path.row(t);
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = a; b < dim; ++b) smat(a, b) += srow[a] * srow[b];
    }
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = a; b < dim; ++b) {
            smat(a, b) /= static_cast<double>(n);
            smat(b, a) = smat(a, b);
        }
    const auto lu = LuFactorization::compute(fit.j_tilde);
    fit.std_errors.assign(dim, std::numeric_limits<double>::quiet_NaN());
    if (!lu.singular()) {
        const auto jinv = lu.inverse();
        const auto cov = matmul(matmul(jinv, smat), jinv);
        for (std::size_t k = 0; k < dim; ++k)
            fit.std_errors[k] = std::sqrt(std::max(cov(k, k), 0.0) / static_cast<double>(n));
    }
    return fit;
}

} // namespace garchqr
