#pragma once

#include <functional>

namespace bgacq {

/// Adaptive Gauss-Kronrod 15/7 quadrature of f over [a, b] to absolute
/// tolerance tol. Throws OracleError when the interval budget is exhausted
/// before the error estimate drops below tol.
double adaptive_quadrature(const std::function<double(double)>& f, double a, double b, double tol);

/// Reference value of int_0^t k(s) g(t-s) ds, independent of the CQ path.
/// `singularity_exponent` declares an endpoint behavior k(s) ~ s^beta
/// (beta > -1) at s = 0; it is removed by the substitution s = u^{1/(1+beta)}
/// before the adaptive rule runs.
double oracle_direct_convolution(const std::function<double(double)>& time_kernel,
                                 const std::function<double(double)>& g, double t, double tol,
                                 double singularity_exponent = 0.0);

}  // namespace bgacq
