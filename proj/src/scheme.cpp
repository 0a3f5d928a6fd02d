#include "bgacq/scheme.hpp"

#include <cmath>
#include <ostream>

#include "bgacq/errors.hpp"

namespace bgacq {

void SchemeParams::validate_widths() const {
    if (k1 < 0 || k2 < 0) throw ArgumentError("SchemeParams: k1, k2 must be nonnegative");
    if (m < 1) throw ArgumentError("SchemeParams: m must be positive");
}

void SchemeParams::validate() const {
    validate_widths();
    if (m < stencil_width())
        throw ArgumentError("SchemeParams: m must be at least k1+k2+2 (got m=" +
                            std::to_string(m) + ", need " + std::to_string(stencil_width()) + ")");
}

Grid Grid::make(double T, int N, int m) {
    if (!(T > 0.0)) throw ArgumentError("Grid: T must be positive");
    if (N < 1 || m < 1) throw ArgumentError("Grid: N and m must be positive");
    Grid g;
    g.T = T;
    g.N = N;
    g.m = m;
    g.h = T / N;
    return g;
}

double fundamental_poly(const SchemeParams& params, int i, double v) {
    params.validate_widths();
    if (i < -params.k1 || i > params.k2 + 1)
        throw ArgumentError("fundamental_poly: node index out of [-k1, k2+1]");
    double p = 1.0;
    for (int l = -params.k1; l <= params.k2 + 1; ++l) {
        if (l == i) continue;
        p *= (v - l) / static_cast<double>(i - l);
    }
    return p;
}

namespace detail {

std::vector<Rational> fundamental_poly_coeffs(const SchemeParams& params, int i) {
    // expand prod_{l != i} (v - l), divide by prod_{l != i} (i - l)
    std::vector<Rational> num{Rational(1)};
    Rational den(1);
    for (int l = -params.k1; l <= params.k2 + 1; ++l) {
        if (l == i) continue;
        std::vector<Rational> next(num.size() + 1);
        for (std::size_t d = 0; d < num.size(); ++d) {
            next[d] += num[d] * Rational(-l);
            next[d + 1] += num[d];
        }
        num = std::move(next);
        den *= Rational(i - l);
    }
    for (auto& c : num) c /= den;
    return num;
}

Rational integrate_poly(const std::vector<Rational>& coeffs, const Rational& a, const Rational& b) {
    Rational total(0);
    for (std::size_t d = 0; d < coeffs.size(); ++d) {
        const int e = static_cast<int>(d) + 1;
        total += coeffs[d] * (Rational::ipow(b, e) - Rational::ipow(a, e)) / Rational(e);
    }
    return total;
}

}  // namespace detail

std::vector<Rational> interior_weights(const SchemeParams& params) {
    params.validate_widths();
    std::vector<Rational> w;
    w.reserve(params.stencil_width());
    for (int i = -params.k1; i <= params.k2 + 1; ++i) {
        auto c = detail::fundamental_poly_coeffs(params, i);
        w.push_back(detail::integrate_poly(c, Rational(0), Rational(1)) / Rational(params.m));
    }
    return w;
}

std::vector<Rational> boundary_weights(const SchemeParams& params, int j) {
    params.validate_widths();
    int lo;
    if (j >= 0 && j <= params.k1 - 1) {
        lo = j - params.k1;
    } else if (j >= params.m - params.k2 && j <= params.m - 1) {
        lo = j - params.m + params.k2 + 1;
    } else {
        throw ArgumentError("boundary_weights: j=" + std::to_string(j) +
                            " is an interior row; use interior_weights");
    }
    std::vector<Rational> w;
    w.reserve(params.stencil_width());
    for (int i = -params.k1; i <= params.k2 + 1; ++i) {
        auto c = detail::fundamental_poly_coeffs(params, i);
        w.push_back(detail::integrate_poly(c, Rational(lo), Rational(lo + 1)) / Rational(params.m));
    }
    return w;
}

BlockTableau assemble_tableau(const SchemeParams& params) {
    params.validate();
    const int m = params.m;
    const int w = params.stencil_width();

    // Subinterval row j covers block nodes (columns of Atilde, 0..m):
    //   j = 0..k1-1        -> columns 0..k1+k2+1          (left edge rows)
    //   j = k1..m-k2-1     -> columns j-k1..j+k2+1        (interior stencil)
    //   j = m-k2..m-1      -> columns m-k1-k2-1..m        (right edge rows)
    BlockTableau tab;
    tab.params = params;
    tab.exact.assign(m, std::vector<Rational>(m + 1, Rational(0)));
    const auto interior = interior_weights(params);
    for (int j = 0; j < m; ++j) {
        const bool left = j <= params.k1 - 1;
        const bool right = j >= m - params.k2;
        const auto row = (left || right) ? boundary_weights(params, j) : interior;
        const int c0 = left ? 0 : (right ? m + 1 - w : j - params.k1);
        for (int t = 0; t < w; ++t) tab.exact[j][c0 + t] += row[t];
    }

    tab.a.resize(m);
    tab.A.resize(m, m);
    for (int j = 0; j < m; ++j) {
        tab.a(j) = tab.exact[j][0].to_double();
        for (int c = 0; c < m; ++c) tab.A(j, c) = tab.exact[j][c + 1].to_double();
    }
    tab.l = Eigen::VectorXd::Zero(m);
    tab.l(0) = -1.0;
    tab.L = Eigen::MatrixXd::Identity(m, m);
    for (int j = 1; j < m; ++j) tab.L(j, j - 1) = -1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(tab.A);
    if (!lu.isInvertible())
        throw NumericError("assemble_tableau: A is singular for (k1,k2,m)=(" +
                           std::to_string(params.k1) + "," + std::to_string(params.k2) + "," +
                           std::to_string(m) + ")");
    return tab;
}

void dump_tableau(const BlockTableau& tab, std::ostream& os) {
    const int m = tab.params.m;
    os.precision(17);
    os << std::scientific;
    os << "# k1=" << tab.params.k1 << " k2=" << tab.params.k2 << " m=" << m << "\n";
    os << "# Atilde (" << m << " x " << (m + 1) << "), row-major\n";
    for (int j = 0; j < m; ++j) {
        for (int c = 0; c <= m; ++c) os << tab.exact[j][c].to_double() << (c == m ? "\n" : ",");
    }
    os << "# Ltilde (" << m << " x " << (m + 1) << "), row-major\n";
    for (int j = 0; j < m; ++j) {
        for (int c = 0; c <= m; ++c) {
            const double v = (c == 0) ? tab.l(j) : tab.L(j, c - 1);
            os << v << (c == m ? "\n" : ",");
        }
    }
}

}  // namespace bgacq
