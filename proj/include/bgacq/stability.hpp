#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bgacq/scheme.hpp"

namespace bgacq {

/// Outcome of the Assumption-1 certification of a scheme.
struct StabilityReport {
    SchemeParams params;
    std::vector<std::complex<double>> generator_spectrum;
    double r_infinity = 0.0;
    double imaginary_axis_max = 0.0;  // max over sampled omega != 0 of |R_m(i omega)|
    bool spectrum_positive = false;
    bool imaginary_axis_ok = false;
    bool r_infinity_ok = false;
    bool assumption_satisfied = false;
    int samples_used = 0;
    double omega_max = 0.0;
    double certification_tol = 0.0;
};

/// Leading dissipation terms of lambda_hat - lambda where
/// R_m(lambda_hat h) = e^{i omega h}:
///   Re ~ coeff_real * omega (omega h)^order_real,
///   Im ~ coeff_imag * omega (omega h)^order_imag.
struct DissipationExpansion {
    SchemeParams params;
    int order_real = 0;
    double coeff_real = 0.0;
    int order_imag = 0;
    double coeff_imag = 0.0;
    double fit_residual_real = 0.0;  // relative misfit of the fitted model
    double fit_residual_imag = 0.0;
};

/// Ordered trace of the |R_m(z)| = 1 locus.
struct BoundaryTrace {
    std::vector<std::complex<double>> points;
    int rays_failed = 0;
};

/// R_m(z) = e_m^T (L - zA)^{-1} (z a - l), one dense solve.
/// Throws SingularityError when z sits on the generator spectrum.
std::complex<double> stability_function(const BlockTableau& tab, std::complex<double> z);

/// |R_m(inf)| = |e_m^T A^{-1} a|.
double stability_at_infinity(const BlockTableau& tab);

/// Eigenvalues of A^{-1} L, sorted by (real, imag).
std::vector<std::complex<double>> generator_spectrum(const BlockTableau& tab);

/// Checks (i) generator spectrum in the open right half-plane,
/// (ii) |R_m(i omega)| <= 1 + 1e-10 on a log grid of omega in
/// [1e-3, omega_max] plus reflected negatives, (iii) |R_m(inf)| < 1.
/// Failures are recorded in the report, never thrown.
StabilityReport certify_assumption(const BlockTableau& tab, int omega_samples = 4096,
                                   double omega_max = 1e6);

/// Smallest m in [k1+k2+2, m_max] whose tableau passes certify_assumption.
std::optional<int> min_block_size(int k1, int k2, int m_max);

/// Traces |R_m(z)| = 1 along theta_samples rays from the spectrum centroid.
BoundaryTrace stability_boundary(const BlockTableau& tab, int theta_samples);

/// Solves R_m(lambda_hat h) = e^{i omega h} near the origin for each h in
/// h_samples (omega = 1), then fits leading orders/coefficients of the
/// real and imaginary parts of lambda_hat - i omega by log-log regression.
/// Requires omega*h <= 0.1 for every sample. Throws DiagnosticError when
/// the fitted slopes are not near integers.
DissipationExpansion dissipation_expansion(const BlockTableau& tab,
                                           std::span<const double> h_samples);

/// Key-value text export of a certification report.
void write_report(const StabilityReport& report, std::ostream& os);
/// CSV (re,im) export of complex point sets (spectra, boundary traces).
void write_points_csv(std::span<const std::complex<double>> pts, std::ostream& os);

}  // namespace bgacq
