#pragma once

namespace emgfit::special {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double beta_inc(double a, double b, double x);

/// Digamma function psi(x) for x > 0.
double digamma(double x);

/// Standard normal CDF.
double normal_cdf(double z);

/// Upper-tail probability of the F distribution with (d1, d2) dof.
double f_sf(double f, double d1, double d2);

}  // namespace emgfit::special
