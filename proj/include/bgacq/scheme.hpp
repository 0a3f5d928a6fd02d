#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "bgacq/rational.hpp"

namespace bgacq {

/// Block generalized Adams scheme parameters: interpolation widths (k1, k2)
/// and block size m (fine subintervals per coarse step).
struct SchemeParams {
    int k1 = 0;
    int k2 = 1;
    int m = 3;

    /// Number of interpolation nodes, k1 + k2 + 2.
    int stencil_width() const { return k1 + k2 + 2; }

    /// Throws ArgumentError unless k1,k2 >= 0, m >= 1.
    void validate_widths() const;
    /// Additionally requires m >= k1 + k2 + 2 so the edge rows fit.
    void validate() const;
};

/// Uniform coarse/fine grid on [0,T]: coarse nodes tau_n = n h, fine nodes
/// t_j^n = tau_n + j h/m. Endpoint identities t_0^n = tau_n and
/// t_m^n = tau_{n+1} hold exactly.
struct Grid {
    double T = 1.0;
    int N = 1;
    int m = 1;
    double h = 1.0;

    static Grid make(double T, int N, int m);

    double coarse(int n) const { return n == N ? T : n * h; }
    double fine(int n, int j) const {
        if (j == 0) return coarse(n);
        if (j == m) return coarse(n + 1);
        return coarse(n) + j * (h / m);
    }
};

/// Assembled block tableau. Atilde = [a|A] holds the quadrature weights of
/// the m subinterval rows over the m+1 block nodes; Ltilde = [l|L] the
/// difference stencil. `exact` keeps the rational Atilde for exact checks.
struct BlockTableau {
    SchemeParams params;
    Eigen::VectorXd a;
    Eigen::MatrixXd A;
    Eigen::VectorXd l;
    Eigen::MatrixXd L;
    std::vector<std::vector<Rational>> exact;  // m rows x (m+1) cols

    int size() const { return params.m; }
};

/// Lagrange cardinal polynomial phi_i^{k1,k2}(v) on nodes -k1..k2+1,
/// evaluated by the direct product formula.
double fundamental_poly(const SchemeParams& params, int i, double v);

/// Interior quadrature weights alpha_i = (1/m) * int_0^1 phi_i dv,
/// i = -k1..k2+1, exactly integrated.
std::vector<Rational> interior_weights(const SchemeParams& params);

/// Edge-row weights alpha_i^(j): j in 0..k1-1 integrates over
/// [j-k1, j-k1+1], j in m-k2..m-1 over [j-m+k2+1, j-m+k2+2].
std::vector<Rational> boundary_weights(const SchemeParams& params, int j);

/// Builds [a|A] and [l|L] for the scheme. Throws ArgumentError when
/// m < k1+k2+2, NumericError when the assembled A is singular.
BlockTableau assemble_tableau(const SchemeParams& params);

/// Row-major full-precision dump (17 significant digits) of Atilde and
/// Ltilde for cross-checking against other implementations.
void dump_tableau(const BlockTableau& tab, std::ostream& os);

namespace detail {
/// Monomial coefficients of phi_i (degree k1+k2+1), exact.
std::vector<Rational> fundamental_poly_coeffs(const SchemeParams& params, int i);
/// Exact integral of a coefficient polynomial over [a, b].
Rational integrate_poly(const std::vector<Rational>& coeffs, const Rational& a, const Rational& b);
}  // namespace detail

}  // namespace bgacq
