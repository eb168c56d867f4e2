#include "garchqr/garch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "garchqr/errors.hpp"
#include "garchqr/stats.hpp"

namespace garchqr {

double GarchParams::alpha_sum() const {
    double s = 0.0;
    for (double a : alpha) s += a;
    return s;
}

double GarchParams::beta_sum() const {
    double s = 0.0;
    for (double b : beta) s += b;
    return s;
}

std::vector<double> GarchParams::to_vector() const {
    std::vector<double> v;
    v.reserve(dim());
    v.push_back(alpha0);
    v.insert(v.end(), alpha.begin(), alpha.end());
    v.insert(v.end(), beta.begin(), beta.end());
    return v;
}

GarchParams GarchParams::from_vector(std::span<const double> v, std::size_t p, std::size_t q) {
    if (v.size() != 1 + p + q) throw std::invalid_argument("GarchParams::from_vector: bad length");
    GarchParams params;
    params.alpha0 = v[0];
    params.alpha.assign(v.begin() + 1, v.begin() + 1 + q);
    params.beta.assign(v.begin() + 1 + q, v.end());
    return params;
}

void ThetaBox::validate(std::size_t p) const {
    if (!(w_lo > 0.0) || !(w_hi > w_lo)) throw ConstraintViolation("theta box: need 0 < w_lo < w_hi");
    if (!(rho0 > 0.0 && rho0 < 1.0)) throw ConstraintViolation("theta box: need rho0 in (0,1)");
    if (!(static_cast<double>(p) * w_lo < rho0))
        throw ConstraintViolation("theta box: need p * w_lo < rho0");
}

bool ThetaBox::contains(const GarchParams& params) const {
    auto in_box = [&](double v) { return v >= w_lo && v <= w_hi; };
    if (!in_box(params.alpha0)) return false;
    for (double a : params.alpha)
        if (!in_box(a)) return false;
    for (double b : params.beta)
        if (!in_box(b)) return false;
    return params.beta_sum() <= rho0;
}

bool ThetaBox::admits_recursion(const GarchParams& params) const {
    if (!(params.alpha0 >= w_lo && params.alpha0 <= w_hi)) return false;
    for (double a : params.alpha)
        if (!(a >= 0.0 && a <= w_hi)) return false;
    for (double b : params.beta)
        if (!(b >= 0.0 && b <= w_hi)) return false;
    return params.beta_sum() <= rho0;
}

GarchParams ThetaBox::project(GarchParams params) const {
    auto clip = [&](double v) { return std::clamp(v, w_lo, w_hi); };
    params.alpha0 = clip(params.alpha0);
    for (double& a : params.alpha) a = clip(a);
    for (double& b : params.beta) b = clip(b);
    // Rescale onto the beta-sum cap; the (1 - 4eps) factor keeps rounding
    // from landing an ulp above rho0, and the w_lo floor can only push the
    // sum up again for several betas, hence the short loop.
    for (int pass = 0; pass < 4 && params.beta_sum() > rho0; ++pass) {
        const double scale = rho0 / params.beta_sum() * (1.0 - 4e-16);
        for (double& b : params.beta) b = std::max(b * scale, w_lo);
    }
    return params;
}

InnovationLaw InnovationLaw::student(double nu) {
    if (!(nu > 2.0)) throw std::invalid_argument("student innovations need nu > 2 for unit variance");
    return {Kind::student_t, nu};
}

double InnovationLaw::sample(RngStream& rng) const {
    if (kind == Kind::standard_normal) return rng.next_normal();
    return rng.next_student_t(nu) * std::sqrt((nu - 2.0) / nu);
}

double InnovationLaw::cdf(double x) const {
    if (kind == Kind::standard_normal) return stats::normal_cdf(x);
    return stats::student_t_cdf(x / std::sqrt((nu - 2.0) / nu), nu);
}

double InnovationLaw::quantile(double tau) const {
    if (kind == Kind::standard_normal) return stats::normal_quantile(tau);
    return stats::student_t_quantile(tau, nu) * std::sqrt((nu - 2.0) / nu);
}

const char* InnovationLaw::name() const {
    return kind == Kind::standard_normal ? "normal" : "student-t";
}

namespace {

VolatilityPath run_recursion(const GarchParams& params, const ReturnSeries& series,
                             bool want_gradient) {
    const std::size_t n = series.size();
    const std::size_t p = params.p();
    const std::size_t q = params.q();
    const std::size_t dim = params.dim();
    const double init = series.mean_square();

    VolatilityPath path;
    path.init_constant = init;
    path.p = p;
    path.q = q;
    path.h.resize(n);
    if (want_gradient) path.gradient = Matrix(n, dim, 0.0);

    // x^2 lag lookup: values at non-positive times equal the init constant.
    auto x2_at = [&](std::ptrdiff_t t) {
        return t >= 1 ? series[static_cast<std::size_t>(t - 1)] * series[static_cast<std::size_t>(t - 1)]
                      : init;
    };
    auto h_at = [&](std::ptrdiff_t t) {
        return t >= 1 ? path.h[static_cast<std::size_t>(t - 1)] : init;
    };

    for (std::size_t t = 1; t <= n; ++t) {
        double h = params.alpha0;
        for (std::size_t i = 1; i <= q; ++i)
            h += params.alpha[i - 1] * x2_at(static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(i));
        for (std::size_t j = 1; j <= p; ++j)
            h += params.beta[j - 1] * h_at(static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(j));
        path.h[t - 1] = h;

        if (want_gradient) {
            auto g = path.gradient.row(t - 1);
            g[0] = 1.0;
            for (std::size_t i = 1; i <= q; ++i)
                g[i] = x2_at(static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(i));
            for (std::size_t j = 1; j <= p; ++j) {
                const std::ptrdiff_t lag = static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(j);
                g[q + j] = h_at(lag);
                if (lag >= 1) {
                    auto gprev = path.gradient.row(static_cast<std::size_t>(lag - 1));
                    const double bj = params.beta[j - 1];
                    for (std::size_t k = 0; k < dim; ++k) g[k] += bj * gprev[k];
                }
            }
        }
    }
    return path;
}

} // namespace

VolatilityPath volatility_path(const GarchParams& params, const ReturnSeries& series,
                               bool want_gradient, const ThetaBox& box) {
    box.validate(params.p());
    if (!box.admits_recursion(params))
        throw ConstraintViolation("volatility_path: parameters outside the admissible set");
    return run_recursion(params, series, want_gradient);
}

VolatilityPath volatility_path_unchecked(const GarchParams& params, const ReturnSeries& series,
                                         bool want_gradient) {
    return run_recursion(params, series, want_gradient);
}

namespace {

double lagged_x2(const ReturnSeries& series, double init, std::ptrdiff_t t) {
    return t >= 1 ? series[static_cast<std::size_t>(t - 1)] * series[static_cast<std::size_t>(t - 1)]
                  : init;
}

double lagged_h(const std::vector<double>& h, double init, std::ptrdiff_t t) {
    return t >= 1 ? h[static_cast<std::size_t>(t - 1)] : init;
}

} // namespace

Matrix regressor_matrix(const VolatilityPath& path, const ReturnSeries& series) {
    const std::size_t n = series.size();
    if (path.h.size() != n) throw std::invalid_argument("regressor_matrix: path/series mismatch");
    const std::size_t p = path.p;
    const std::size_t q = path.q;
    Matrix z(n, 1 + p + q, 0.0);
    for (std::size_t t = 1; t <= n; ++t) {
        auto row = z.row(t - 1);
        row[0] = 1.0;
        for (std::size_t i = 1; i <= q; ++i)
            row[i] = lagged_x2(series, path.init_constant,
                               static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(i));
        for (std::size_t j = 1; j <= p; ++j)
            row[q + j] = lagged_h(path.h, path.init_constant,
                                  static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(j));
    }
    return z;
}

std::vector<double> regressor_next(const VolatilityPath& path, const ReturnSeries& series) {
    const std::size_t n = series.size();
    const std::size_t p = path.p;
    const std::size_t q = path.q;
    std::vector<double> z(1 + p + q, 0.0);
    z[0] = 1.0;
    const auto tn = static_cast<std::ptrdiff_t>(n) + 1;
    for (std::size_t i = 1; i <= q; ++i)
        z[i] = lagged_x2(series, path.init_constant, tn - static_cast<std::ptrdiff_t>(i));
    for (std::size_t j = 1; j <= p; ++j)
        z[q + j] = lagged_h(path.h, path.init_constant, tn - static_cast<std::ptrdiff_t>(j));
    return z;
}

SimulatedSeries simulate_garch(const GarchParams& params, const InnovationLaw& law,
                               std::size_t n, std::size_t burn_in, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("simulate_garch: n must be positive");
    if (!(params.alpha0 > 0.0)) throw ConstraintViolation("simulate_garch: alpha0 must be positive");
    for (double a : params.alpha)
        if (a < 0.0) throw ConstraintViolation("simulate_garch: negative ARCH coefficient");
    for (double b : params.beta)
        if (b < 0.0) throw ConstraintViolation("simulate_garch: negative GARCH coefficient");

    const std::size_t p = params.p();
    const std::size_t q = params.q();
    const double persistence = params.persistence();
    const double h0 = persistence < 1.0 ? params.alpha0 / (1.0 - persistence) : params.alpha0;

    RngStream rng(seed);
    const std::size_t total = burn_in + n;
    std::vector<double> x(total), h(total);
    for (std::size_t t = 0; t < total; ++t) {
        double ht = params.alpha0;
        for (std::size_t i = 1; i <= q; ++i) {
            const double x2 = t >= i ? x[t - i] * x[t - i] : h0;
            ht += params.alpha[i - 1] * x2;
        }
        for (std::size_t j = 1; j <= p; ++j) {
            const double hj = t >= j ? h[t - j] : h0;
            ht += params.beta[j - 1] * hj;
        }
        h[t] = ht;
        x[t] = std::sqrt(ht) * law.sample(rng);
    }

    double h_next = params.alpha0;
    for (std::size_t i = 1; i <= q; ++i) {
        const double x2 = total >= i ? x[total - i] * x[total - i] : h0;
        h_next += params.alpha[i - 1] * x2;
    }
    for (std::size_t j = 1; j <= p; ++j) {
        const double hj = total >= j ? h[total - j] : h0;
        h_next += params.beta[j - 1] * hj;
    }

    SimulatedSeries out{
        ReturnSeries::from_returns(std::vector<double>(x.begin() + burn_in, x.end())),
        std::vector<double>(h.begin() + burn_in, h.end()),
        h_next,
    };
    return out;
}

} // namespace garchqr
