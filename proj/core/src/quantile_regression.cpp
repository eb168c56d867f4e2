#include "garchqr/quantile_regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "garchqr/errors.hpp"

namespace garchqr {

double check_loss(double u, double tau) {
    return u * (tau - (u < 0.0 ? 1.0 : 0.0));
}

double quantile_score(double u, double tau) {
    return tau - (u < 0.0 ? 1.0 : 0.0);
}

namespace {

struct CyclingDetected : SolverError {
    using SolverError::SolverError;
};

struct Candidate {
    std::size_t basis_pos;
    double sign; // +1 or -1
    double derivative;
};

class VertexDescent {
public:
    VertexDescent(const QrProblem& problem, std::vector<double> responses)
        : X_(problem.design),
          y_(std::move(responses)),
          w_(problem.weights),
          tau_(problem.tau),
          n_(problem.design.rows()),
          d_(problem.design.cols()) {
        in_basis_.assign(n_, 0);
        double mass = 0.0;
        for (std::size_t t = 0; t < n_; ++t) {
            double rowsum = 1.0;
            for (double v : X_.row(t)) rowsum += std::abs(v);
            mass += w_[t] * rowsum;
        }
        tol_ = 1e-10 * (1.0 + mass / static_cast<double>(n_));
        pick_initial_basis();
        refit();
    }

    void run() {
        const std::size_t max_iter = 100 * (n_ + d_) + 1000;
        std::size_t stalled = 0;
        bool bland = false;
        for (iterations_ = 0; iterations_ < max_iter; ++iterations_) {
            auto cands = improving_directions(bland);
            if (cands.empty()) break;
            const double before = objective();
            // A direction whose line search exhausts its breakpoints is
            // numerically flat (the objective is coercive): skip it.
            bool moved = false;
            for (const auto& c : cands) {
                if (pivot(c)) { moved = true; break; }
            }
            if (!moved) break;
            const double after = objective();
            if (after > before - 1e-14 * (1.0 + std::abs(before))) {
                if (++stalled > 2 * d_ + 5) bland = true;
            } else {
                stalled = 0;
                bland = false;
            }
        }
        if (iterations_ >= max_iter)
            throw CyclingDetected("quantile regression did not converge (cycling suspected)");
        slide_to_lex_largest();
    }

    QrSolution finish(const std::vector<double>& original_y) {
        // The search may have run on perturbed responses; the final basis is
        // refit against the original ones.
        y_ = original_y;
        refit();
        QrSolution sol;
        sol.coef = beta_;
        sol.objective = objective();
        sol.active_basis = basis_;
        std::sort(sol.active_basis.begin(), sol.active_basis.end());
        sol.residuals = resid_;
        bool flat = false;
        for (const auto& c : zero_cost_directions())
            if (std::abs(c.derivative) <= tol_) { flat = true; break; }
        std::size_t zero_count = 0;
        for (std::size_t t = 0; t < n_; ++t)
            if (is_zero_residual(t)) ++zero_count;
        sol.status = (flat || zero_count > d_) ? QrStatus::degenerate_optimal : QrStatus::optimal;
        return sol;
    }

private:
    double zero_tol(std::size_t t) const { return 1e-11 * (1.0 + std::abs(y_[t])); }

    bool is_zero_residual(std::size_t t) const {
        return in_basis_[t] || std::abs(resid_[t]) <= zero_tol(t);
    }

    void pick_initial_basis() {
        if (n_ < d_) throw SolverError("quantile regression: fewer observations than parameters");
        basis_.clear();
        std::vector<std::vector<double>> ortho; // orthogonalized copies of accepted rows
        for (std::size_t t = 0; t < n_ && basis_.size() < d_; ++t) {
            std::vector<double> v(X_.row(t).begin(), X_.row(t).end());
            const double norm0 = std::sqrt(dot(v, v));
            if (norm0 == 0.0) continue;
            for (const auto& u : ortho) {
                const double proj = dot(v, u);
                for (std::size_t k = 0; k < d_; ++k) v[k] -= proj * u[k];
            }
            const double norm1 = std::sqrt(dot(v, v));
            if (norm1 > 1e-10 * norm0) {
                for (auto& vk : v) vk /= norm1;
                ortho.push_back(std::move(v));
                basis_.push_back(t);
            }
        }
        if (basis_.size() < d_) report_rank_deficiency();
        for (std::size_t t : basis_) in_basis_[t] = 1;
    }

    [[noreturn]] void report_rank_deficiency() const {
        // Column-pivoted Gram-Schmidt over the design columns; columns that
        // never get a pivot are linearly dependent on the others.
        std::vector<std::vector<double>> cols(d_, std::vector<double>(n_));
        for (std::size_t t = 0; t < n_; ++t)
            for (std::size_t k = 0; k < d_; ++k) cols[k][t] = X_(t, k);
        std::vector<double> norms0(d_);
        for (std::size_t k = 0; k < d_; ++k) norms0[k] = std::sqrt(dot(cols[k], cols[k]));
        std::vector<char> pivoted(d_, 0);
        for (std::size_t step = 0; step < d_; ++step) {
            std::size_t best = d_;
            double best_norm = 0.0;
            for (std::size_t k = 0; k < d_; ++k) {
                if (pivoted[k]) continue;
                const double nk = std::sqrt(dot(cols[k], cols[k]));
                if (nk > best_norm) { best_norm = nk; best = k; }
            }
            if (best == d_ || best_norm <= 1e-10 * (1.0 + norms0[best == d_ ? 0 : best])) break;
            pivoted[best] = 1;
            auto& u = cols[best];
            for (auto& uv : u) uv /= best_norm;
            for (std::size_t k = 0; k < d_; ++k) {
                if (pivoted[k]) continue;
                const double proj = dot(cols[k], u);
                for (std::size_t t = 0; t < n_; ++t) cols[k][t] -= proj * u[t];
            }
        }
        std::string names;
        for (std::size_t k = 0; k < d_; ++k)
            if (!pivoted[k]) names += (names.empty() ? "" : ", ") + std::to_string(k);
        throw SolverError("quantile regression: design is rank deficient (dependent columns: " +
                          names + ")");
    }

    Matrix basis_matrix() const {
        Matrix b(d_, d_);
        for (std::size_t i = 0; i < d_; ++i) {
            auto r = X_.row(basis_[i]);
            for (std::size_t k = 0; k < d_; ++k) b(i, k) = r[k];
        }
        return b;
    }

    void refit() {
        lu_ = LuFactorization::compute(basis_matrix());
        if (lu_.singular()) throw SolverError("quantile regression: singular basis system");
        std::vector<double> yb(d_);
        for (std::size_t i = 0; i < d_; ++i) yb[i] = y_[basis_[i]];
        beta_ = lu_.solve(yb);
        resid_.resize(n_);
        for (std::size_t t = 0; t < n_; ++t)
            resid_[t] = in_basis_[t] ? 0.0 : y_[t] - dot(X_.row(t), beta_);
    }

    double objective() const {
        double s = 0.0;
        for (std::size_t t = 0; t < n_; ++t) s += w_[t] * check_loss(resid_[t], tau_);
        return s;
    }

    // Pseudo-gradient contribution of all strictly signed residuals.
    std::vector<double> signed_gradient(std::vector<std::size_t>& flat_points) const {
        std::vector<double> s(d_, 0.0);
        flat_points.clear();
        for (std::size_t t = 0; t < n_; ++t) {
            if (in_basis_[t]) continue;
            if (std::abs(resid_[t]) <= zero_tol(t)) {
                flat_points.push_back(t);
                continue;
            }
            const double c = resid_[t] > 0.0 ? -w_[t] * tau_ : w_[t] * (1.0 - tau_);
            auto r = X_.row(t);
            for (std::size_t k = 0; k < d_; ++k) s[k] += c * r[k];
        }
        return s;
    }

    std::vector<double> edge_direction(std::size_t basis_pos, double sign) const {
        std::vector<double> e(d_, 0.0);
        e[basis_pos] = sign;
        return lu_.solve(e);
    }

    double direction_derivative(std::size_t basis_pos, double sign, double u_j,
                                const std::vector<std::size_t>& flat_points) const {
        double f = sign * u_j + w_[basis_[basis_pos]] * (sign > 0.0 ? 1.0 - tau_ : tau_);
        if (!flat_points.empty()) {
            const auto delta = edge_direction(basis_pos, sign);
            for (std::size_t t : flat_points) {
                const double g = dot(X_.row(t), delta);
                f += w_[t] * std::max((1.0 - tau_) * g, -tau_ * g);
            }
        }
        return f;
    }

    std::vector<Candidate> improving_directions(bool bland) const {
        std::vector<std::size_t> flat;
        const auto s = signed_gradient(flat);
        // u solves X_B' u = s, giving s' delta recursion-free for every edge.
        const auto lut = LuFactorization::compute(transpose(basis_matrix()));
        const auto u = lut.solve(s);

        std::vector<Candidate> out;
        for (std::size_t j = 0; j < d_; ++j) {
            for (double sign : {1.0, -1.0}) {
                const double f = direction_derivative(j, sign, u[j], flat);
                if (f < -tol_) out.push_back({j, sign, f});
            }
        }
        // Bland mode keeps the fixed (position, sign) order; otherwise the
        // steepest edge goes first.
        if (!bland) {
            std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
                if (a.derivative != b.derivative) return a.derivative < b.derivative;
                if (a.basis_pos != b.basis_pos) return a.basis_pos < b.basis_pos;
                return a.sign > b.sign;
            });
        }
        return out;
    }

    std::vector<Candidate> zero_cost_directions() const {
        std::vector<std::size_t> flat;
        const auto s = signed_gradient(flat);
        const auto lut = LuFactorization::compute(transpose(basis_matrix()));
        const auto u = lut.solve(s);
        std::vector<Candidate> out;
        for (std::size_t j = 0; j < d_; ++j)
            for (double sign : {1.0, -1.0})
                out.push_back({j, sign, direction_derivative(j, sign, u[j], flat)});
        return out;
    }

    struct Breakpoint {
        double t;
        std::size_t obs;
        double gain; // w |g|
    };

    // Walks the piecewise-linear objective along delta until its slope turns
    // strictly positive; slope-zero stretches are crossed in full (maximal
    // step), which pins down the flat-segment convention.
    bool line_search(const std::vector<double>& delta, double d0, std::size_t& entering,
                     double& step) const {
        std::vector<Breakpoint> bps;
        bps.reserve(n_);
        for (std::size_t t = 0; t < n_; ++t) {
            if (in_basis_[t] || std::abs(resid_[t]) <= zero_tol(t)) continue;
            const double g = dot(X_.row(t), delta);
            if (g == 0.0) continue;
            const double bt = resid_[t] / g;
            if (bt <= 0.0) continue;
            bps.push_back({bt, t, w_[t] * std::abs(g)});
        }
        std::sort(bps.begin(), bps.end(), [](const Breakpoint& a, const Breakpoint& b) {
            if (a.t != b.t) return a.t < b.t;
            return a.obs < b.obs;
        });
        double cum = d0;
        std::size_t i = 0;
        while (i < bps.size()) {
            // group numerically coincident breakpoints
            std::size_t jmax = i;
            while (jmax + 1 < bps.size() && bps[jmax + 1].t - bps[i].t <= 1e-13 * (1.0 + bps[i].t))
                ++jmax;
            for (std::size_t k = i; k <= jmax; ++k) cum += bps[k].gain;
            if (cum > tol_) {
                entering = bps[i].obs; // lowest obs index in the group
                step = bps[i].t;
                return true;
            }
            i = jmax + 1;
        }
        return false;
    }

    bool pivot(const Candidate& c) {
        const auto delta = edge_direction(c.basis_pos, c.sign);
        std::size_t entering = n_;
        double step = 0.0;
        if (!line_search(delta, c.derivative, entering, step)) return false;
        const std::size_t leaving = basis_[c.basis_pos];
        in_basis_[leaving] = 0;
        in_basis_[entering] = 1;
        basis_[c.basis_pos] = entering;
        refit();
        return true;
    }

    // At a flat optimum, repeatedly slide along zero-cost lexicographically
    // positive edges. Each slide adds a lex-positive increment to the
    // coefficients, so the walk strictly increases in lex order and stops at
    // the lex-largest optimal vertex.
    void slide_to_lex_largest() {
        const std::size_t cap = 4 * d_ + 8;
        for (std::size_t round = 0; round < cap; ++round) {
            bool moved = false;
            for (const auto& c : zero_cost_directions()) {
                if (std::abs(c.derivative) > tol_) continue;
                const auto delta = edge_direction(c.basis_pos, c.sign);
                double dmax = 0.0;
                for (double v : delta) dmax = std::max(dmax, std::abs(v));
                if (dmax == 0.0) continue;
                std::size_t first = d_;
                for (std::size_t k = 0; k < d_; ++k)
                    if (std::abs(delta[k]) > 1e-12 * dmax) { first = k; break; }
                if (first == d_ || delta[first] < 0.0) continue;
                std::size_t entering = n_;
                double step = 0.0;
                if (!line_search(delta, std::max(c.derivative, 0.0), entering, step)) continue;
                if (step <= 0.0) continue;
                const std::size_t leaving = basis_[c.basis_pos];
                in_basis_[leaving] = 0;
                in_basis_[entering] = 1;
                basis_[c.basis_pos] = entering;
                refit();
                moved = true;
                break;
            }
            if (!moved) return;
        }
    }

    const Matrix& X_;
    std::vector<double> y_;
    const std::vector<double>& w_;
    double tau_;
    std::size_t n_, d_;
    double tol_ = 0.0;

    std::vector<std::size_t> basis_;
    std::vector<char> in_basis_;
    LuFactorization lu_;
    std::vector<double> beta_;
    std::vector<double> resid_;
    std::size_t iterations_ = 0;
};

void validate(const QrProblem& p) {
    const std::size_t n = p.design.rows();
    const std::size_t d = p.design.cols();
    if (d == 0 || n == 0) throw SolverError("quantile regression: empty problem");
    if (p.responses.size() != n || p.weights.size() != n)
        throw SolverError("quantile regression: response/weight length mismatch");
    if (!(p.tau > 0.0 && p.tau < 1.0))
        throw SolverError("quantile regression: tau must be in (0,1)");
    for (double w : p.weights)
        if (!(w > 0.0) || !std::isfinite(w))
            throw SolverError("quantile regression: weights must be positive and finite");
    for (double y : p.responses)
        if (!std::isfinite(y)) throw SolverError("quantile regression: non-finite response");
}

} // namespace

QrSolution solve_quantile_regression(const QrProblem& problem) {
    validate(problem);
    try {
        VertexDescent descent(problem, problem.responses);
        descent.run();
        return descent.finish(problem.responses);
    } catch (const CyclingDetected&) {
        // Anti-cycling fallback: restart once on deterministically perturbed
        // responses, then refit the final basis against the original ones.
        double spread = 0.0;
        for (double y : problem.responses) spread = std::max(spread, std::abs(y));
        std::vector<double> perturbed = problem.responses;
        for (std::size_t t = 0; t < perturbed.size(); ++t) {
            const auto hash = (t + 1) * 2654435761ULL % 1000003ULL;
            perturbed[t] += (1.0 + spread) * 1e-10 *
                            (static_cast<double>(hash) / 1000003.0 - 0.5);
        }
        VertexDescent retry(problem, std::move(perturbed));
        retry.run();
        return retry.finish(problem.responses);
    }
}

} // namespace garchqr
