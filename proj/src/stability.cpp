#include "bgacq/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "bgacq/errors.hpp"

namespace bgacq {

namespace {

using Complex = std::complex<double>;

constexpr double kCertificationTol = 1e-10;

Eigen::MatrixXcd shifted_matrix(const BlockTableau& tab, Complex z) {
    return tab.L.cast<Complex>() - z * tab.A.cast<Complex>();
}

/// Last component of (L - zA)^{-1} rhs; z at or near a generator eigenvalue
/// makes the matrix rank-deficient.
Complex solve_last(const BlockTableau& tab, Complex z, const Eigen::VectorXcd& rhs) {
    const Eigen::MatrixXcd M = shifted_matrix(tab, z);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    if (!lu.isInvertible())
        throw SingularityError("stability_function: L - zA is singular near z", z);
    const Eigen::VectorXcd x = lu.solve(rhs);
    if (!x.allFinite())
        throw SingularityError("stability_function: L - zA is singular near z", z);
    return x(tab.size() - 1);
}

Eigen::VectorXcd rhs_vector(const BlockTableau& tab, Complex z) {
    return z * tab.a.cast<Complex>() - tab.l.cast<Complex>();
}

/// R_m'(z), from the resolvent identity.
Complex stability_derivative(const BlockTableau& tab, Complex z) {
    const Eigen::MatrixXcd M = shifted_matrix(tab, z);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    const Eigen::VectorXcd y = lu.solve(rhs_vector(tab, z));
    const Eigen::VectorXcd w = lu.solve(tab.A.cast<Complex>() * y + tab.a.cast<Complex>());
    return w(tab.size() - 1);
}

double slope_fit(const std::vector<double>& logx, const std::vector<double>& logy) {
    const std::size_t n = logx.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += logx[i];
        sy += logy[i];
        sxx += logx[i] * logx[i];
        sxy += logx[i] * logy[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct PartFit {
    int order = 0;
    double coeff = 0.0;
    double residual = 0.0;
};

/// Fit data ~ c * (omega h)^p (+ c2 (omega h)^{p+2}) for integer p.
PartFit fit_part(const std::vector<double>& hs, const std::vector<double>& vals, double omega,
                 const char* label) {
    PartFit out;
    // the root solve resolves lambda_hat to ~eps * omega; anything near that
    // floor is noise and would wreck the log-log slope
    const double noise_floor = 3e-14 * omega;
    double vmax = 0.0;
    for (double v : vals) vmax = std::max(vmax, std::abs(v));
    if (vmax < 10.0 * noise_floor) return out;  // below measurement noise, leave zeroed

    std::vector<double> fh, fv, lx, ly;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (std::abs(vals[i]) > noise_floor) {
            fh.push_back(hs[i]);
            fv.push_back(vals[i]);
            lx.push_back(std::log(omega * hs[i]));
            ly.push_back(std::log(std::abs(vals[i]) / omega));
        }
    }
    if (lx.size() < 3) throw DiagnosticError(std::string("dissipation_expansion: too few usable ") +
                                             label + " samples");
    const double slope = slope_fit(lx, ly);
    const int p = static_cast<int>(std::lround(slope));
    if (std::abs(slope - p) > 0.35)
        throw DiagnosticError(std::string("dissipation_expansion: ") + label +
                              " slope " + std::to_string(slope) + " is not near an integer order");

    // refine the coefficient with the two-term model c (wh)^p + c2 (wh)^{p+2}
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < fh.size(); ++i) {
        const double x1 = omega * std::pow(omega * fh[i], p);
        const double x2 = omega * std::pow(omega * fh[i], p + 2);
        a11 += x1 * x1;
        a12 += x1 * x2;
        a22 += x2 * x2;
        b1 += x1 * fv[i];
        b2 += x2 * fv[i];
    }
    const double det = a11 * a22 - a12 * a12;
    double c = 0.0, c2 = 0.0;
    if (std::abs(det) > 1e-300 * a11 * a22 && a22 > 0 && fh.size() > 3) {
        c = (b1 * a22 - b2 * a12) / det;
        c2 = (a11 * b2 - a12 * b1) / det;
    } else {
        c = b1 / a11;
    }
    double rss = 0.0, tss = 0.0;
    for (std::size_t i = 0; i < fh.size(); ++i) {
        const double model = c * omega * std::pow(omega * fh[i], p) +
                             c2 * omega * std::pow(omega * fh[i], p + 2);
        rss += (fv[i] - model) * (fv[i] - model);
        tss += fv[i] * fv[i];
    }
    out.order = p;
    out.coeff = c;
    out.residual = tss > 0 ? std::sqrt(rss / tss) : 0.0;
    if (out.residual > 0.5)
        throw DiagnosticError(std::string("dissipation_expansion: ") + label +
                              " model misfit " + std::to_string(out.residual));
    return out;
}

}  // namespace

Complex stability_function(const BlockTableau& tab, Complex z) {
    return solve_last(tab, z, rhs_vector(tab, z));
}

double stability_at_infinity(const BlockTableau& tab) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(tab.A);
    if (!lu.isInvertible()) throw NumericError("stability_at_infinity: A is singular");
    const Eigen::VectorXd x = lu.solve(tab.a);
    return std::abs(x(tab.size() - 1));
}

std::vector<Complex> generator_spectrum(const BlockTableau& tab) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(tab.A);
    if (!lu.isInvertible()) throw NumericError("generator_spectrum: A is singular");
    const Eigen::MatrixXd M = lu.solve(tab.L);
    Eigen::EigenSolver<Eigen::MatrixXd> eig(M, /*computeEigenvectors=*/false);
    if (eig.info() != Eigen::Success)
        throw NumericError("generator_spectrum: eigensolver failed to converge");
    std::vector<Complex> out(eig.eigenvalues().data(),
                             eig.eigenvalues().data() + tab.size());
    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

StabilityReport certify_assumption(const BlockTableau& tab, int omega_samples, double omega_max) {
    if (omega_samples < 2) throw ArgumentError("certify_assumption: omega_samples must be >= 2");
    StabilityReport rep;
    rep.params = tab.params;
    rep.omega_max = omega_max;
    rep.certification_tol = kCertificationTol;

    bool a_invertible = true;
    try {
        rep.generator_spectrum = generator_spectrum(tab);
        rep.r_infinity = stability_at_infinity(tab);
    } catch (const NumericError&) {
        a_invertible = false;
    }
    if (a_invertible) {
        rep.spectrum_positive = std::all_of(rep.generator_spectrum.begin(),
                                            rep.generator_spectrum.end(),
                                            [](Complex e) { return e.real() > 0.0; });
        rep.r_infinity_ok = rep.r_infinity < 1.0;
    }

    const double lo = std::log10(1e-3), hi = std::log10(omega_max);
    double worst = 0.0;
    for (int s = 0; s < omega_samples; ++s) {
        const double omega = std::pow(10.0, lo + (hi - lo) * s / (omega_samples - 1));
        for (double sign : {1.0, -1.0}) {
            double mod;
            try {
                mod = std::abs(stability_function(tab, Complex(0.0, sign * omega)));
            } catch (const SingularityError&) {
                mod = std::numeric_limits<double>::infinity();
            }
            worst = std::max(worst, mod);
        }
    }
    rep.imaginary_axis_max = worst;
    rep.samples_used = 2 * omega_samples;
    rep.imaginary_axis_ok = worst <= 1.0 + kCertificationTol;
    rep.assumption_satisfied =
        a_invertible && rep.spectrum_positive && rep.imaginary_axis_ok && rep.r_infinity_ok;
    return rep;
}

std::optional<int> min_block_size(int k1, int k2, int m_max) {
    SchemeParams probe{k1, k2, k1 + k2 + 2};
    probe.validate();
    if (m_max < probe.m) throw ArgumentError("min_block_size: m_max below k1+k2+2");
    for (int m = probe.m; m <= m_max; ++m) {
        BlockTableau tab;
        try {
            tab = assemble_tableau({k1, k2, m});
        } catch (const NumericError&) {
            continue;  // singular A cannot satisfy the assumption
        }
        if (certify_assumption(tab).assumption_satisfied) return m;
    }
    return std::nullopt;
}

BoundaryTrace stability_boundary(const BlockTableau& tab, int theta_samples) {
    if (theta_samples < 16) throw ArgumentError("stability_boundary: theta_samples must be >= 16");
    const auto spectrum = generator_spectrum(tab);
    Complex center(0.0, 0.0);
    for (Complex e : spectrum) center += e;
    center /= static_cast<double>(spectrum.size());

    const auto modulus = [&](Complex z) {
        try {
            return std::abs(stability_function(tab, z));
        } catch (const SingularityError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    BoundaryTrace trace;
    trace.points.reserve(theta_samples);
    for (int k = 0; k < theta_samples; ++k) {
        const double theta = 2.0 * M_PI * k / theta_samples;
        const Complex dir(std::cos(theta), std::sin(theta));
        if (modulus(center) <= 1.0) { ++trace.rays_failed; continue; }
        double r_lo = 0.0, r_hi = std::max(1.0, std::abs(center));
        bool bracketed = false;
        for (int it = 0; it < 80; ++it) {
            if (modulus(center + r_hi * dir) < 1.0) { bracketed = true; break; }
            r_lo = r_hi;
            r_hi *= 2.0;
        }
        if (!bracketed) { ++trace.rays_failed; continue; }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (r_lo + r_hi);
            if (modulus(center + mid * dir) > 1.0) r_lo = mid; else r_hi = mid;
            if (r_hi - r_lo <= 1e-13 * (1.0 + r_hi)) break;
        }
        trace.points.push_back(center + 0.5 * (r_lo + r_hi) * dir);
    }
    return trace;
}

DissipationExpansion dissipation_expansion(const BlockTableau& tab,
                                           std::span<const double> h_samples) {
    constexpr double omega = 1.0;
    if (h_samples.size() < 3)
        throw ArgumentError("dissipation_expansion: need at least 3 h samples");
    for (double h : h_samples)
        if (!(h > 0.0) || omega * h > 0.1 + 1e-12)
            throw ArgumentError("dissipation_expansion: samples must satisfy 0 < omega*h <= 0.1");

    std::vector<double> hs(h_samples.begin(), h_samples.end());
    std::vector<double> re, im;
    re.reserve(hs.size());
    im.reserve(hs.size());
    for (double h : hs) {
        const Complex target = std::exp(Complex(0.0, omega * h));
        Complex x(0.0, omega * h);
        for (int it = 0; it < 100; ++it) {
            const Complex f = stability_function(tab, x) - target;
            const Complex df = stability_derivative(tab, x);
            const Complex step = f / df;
            x -= step;
            if (std::abs(step) <= 1e-17 * std::max(std::abs(x), 1e-3)) break;
        }
        const Complex resid = x / h - Complex(0.0, omega);
        re.push_back(resid.real());
        im.push_back(resid.imag());
    }

    DissipationExpansion out;
    out.params = tab.params;
    const PartFit fr = fit_part(hs, re, omega, "real-part");
    const PartFit fi = fit_part(hs, im, omega, "imag-part");
    out.order_real = fr.order;
    out.coeff_real = fr.coeff;
    out.fit_residual_real = fr.residual;
    out.order_imag = fi.order;
    out.coeff_imag = fi.coeff;
    out.fit_residual_imag = fi.residual;
    return out;
}

void write_report(const StabilityReport& rep, std::ostream& os) {
    os.precision(17);
    os << "k1=" << rep.params.k1 << "\nk2=" << rep.params.k2 << "\nm=" << rep.params.m << "\n";
    os << "r_infinity=" << rep.r_infinity << "\n";
    os << "imaginary_axis_max=" << rep.imaginary_axis_max << "\n";
    os << "omega_max=" << rep.omega_max << "\n";
    os << "samples_used=" << rep.samples_used << "\n";
    os << "certification_tol=" << rep.certification_tol << "\n";
    os << "spectrum_positive=" << (rep.spectrum_positive ? 1 : 0) << "\n";
    os << "imaginary_axis_ok=" << (rep.imaginary_axis_ok ? 1 : 0) << "\n";
    os << "r_infinity_ok=" << (rep.r_infinity_ok ? 1 : 0) << "\n";
    os << "assumption_satisfied=" << (rep.assumption_satisfied ? 1 : 0) << "\n";
    os << "generator_spectrum=";
    for (std::size_t i = 0; i < rep.generator_spectrum.size(); ++i) {
        const auto e = rep.generator_spectrum[i];
        os << (i ? ";" : "") << e.real() << (e.imag() < 0 ? "-" : "+") << std::abs(e.imag()) << "i";
    }
    os << "\n";
}

void write_points_csv(std::span<const std::complex<double>> pts, std::ostream& os) {
    os.precision(17);
    os << "re,im\n";
    for (const auto& p : pts) os << p.real() << "," << p.imag() << "\n";
}

}  // namespace bgacq
