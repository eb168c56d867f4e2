#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace garchqr::stats {

double normal_cdf(double x);
double normal_pdf(double x);
/// Inverse standard normal CDF, |error| < 1e-13 over (0,1).
double normal_quantile(double p);

/// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a,b).
double regularized_beta(double a, double b, double x);

/// Upper tail of the chi-squared distribution with `dof` degrees of freedom.
double chi_squared_upper_tail(double dof, double x);

double student_t_cdf(double x, double nu);
double student_t_pdf(double x, double nu);
double student_t_quantile(double p, double nu);

/// Asymptotic two-sided Kolmogorov-Smirnov p-value for statistic d at sample size n.
double kolmogorov_smirnov_pvalue(double d, std::size_t n);

/// Type-7 quantile (linear interpolation between order statistics).
double quantile_type7(std::span<const double> values, double p);
double quantile_type7_sorted(std::span<const double> sorted, double p);

double mean(std::span<const double> v);
/// Unbiased sample variance (n-1 denominator).
double sample_variance(std::span<const double> v);
/// Population variance (n denominator).
double population_variance(std::span<const double> v);
double sample_sd(std::span<const double> v);
double median(std::span<const double> v);
/// Interquartile range via type-7 quartiles.
double iqr(std::span<const double> v);

} // namespace garchqr::stats
