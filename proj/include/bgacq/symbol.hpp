#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "bgacq/kernels.hpp"
#include "bgacq/scheme.hpp"

namespace bgacq {

/// Eigendecomposition of a discretized differential symbol Delta(zeta).
/// eig_condition is the eigenvector-matrix condition number (spectral
/// norm); eigval_conditions holds the individual eigenvalue condition
/// numbers ||x_i|| ||y_i|| / |y_i^H x_i| from the right/left eigenvectors.
struct SymbolEvaluation {
    std::complex<double> zeta;
    Eigen::MatrixXcd delta;
    Eigen::MatrixXcd eigvecs;
    Eigen::VectorXcd eigvals;
    double eig_condition = 1.0;
    Eigen::VectorXd eigval_conditions;
};

/// Delta(zeta) = (A + zeta a e_m^T)^{-1} (L + zeta l e_m^T), dense solve.
/// Requires |zeta| < 1.
Eigen::MatrixXcd delta_symbol(const BlockTableau& tab, std::complex<double> zeta);

/// Same symbol through the Sherman-Morrison rank-1 update; optional fast
/// path, kept verified against the dense route by tests.
Eigen::MatrixXcd delta_symbol_rank1(const BlockTableau& tab, std::complex<double> zeta);

/// Dense complex eigendecomposition with a reconstruction check
/// ||P D P^{-1} - Delta|| <= 1e-8 ||Delta||; throws NumericError with the
/// residual when the matrix is numerically defective.
SymbolEvaluation eig_symbol(const Eigen::MatrixXcd& delta);

/// K(Delta/h) = P diag(K(d_i/h)) P^{-1}. Eigenvalues are checked against
/// the kernel's analyticity abscissa; violations raise KernelDomainError.
Eigen::MatrixXcd kernel_matrix_function(const Kernel& kernel, const SymbolEvaluation& eval,
                                        double h);

/// Matrix function of a general (possibly non-diagonalizable) matrix via
/// complex Schur form and the Parlett recurrence. Fallback path for
/// near-defective symbols.
Eigen::MatrixXcd matrix_function_schur(
    const Eigen::MatrixXcd& matrix,
    const std::function<std::complex<double>(std::complex<double>)>& f);

}  // namespace bgacq
