#pragma once

#include <functional>

namespace circfss::numeric {

/// Modified Bessel function of the first kind, order 0. Power series with
/// term ratio cutoff 1e-16 for x <= 15, asymptotic expansion above.
double bessel_i0(double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile, p in (0, 1).
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
/// Throws on non-convergence (recursion floor reached with the error bound
/// still above tolerance).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

}  // namespace circfss::numeric
