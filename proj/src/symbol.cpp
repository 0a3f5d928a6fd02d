#include "bgacq/symbol.hpp"

#include <cmath>

#include "bgacq/errors.hpp"

namespace bgacq {

namespace {

using Complex = std::complex<double>;

double spectral_cond(const Eigen::MatrixXcd& P) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P);
    const auto& s = svd.singularValues();
    return s(0) / std::max(s(s.size() - 1), 1e-300);
}

}  // namespace

Eigen::MatrixXcd delta_symbol(const BlockTableau& tab, Complex zeta) {
    if (!(std::abs(zeta) < 1.0))
        throw ArgumentError("delta_symbol: requires |zeta| < 1");
    const int m = tab.size();
    Eigen::MatrixXcd Az = tab.A.cast<Complex>();
    Eigen::MatrixXcd Lz = tab.L.cast<Complex>();
    Az.col(m - 1) += zeta * tab.a.cast<Complex>();
    Lz.col(m - 1) += zeta * tab.l.cast<Complex>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Az);
    const Eigen::MatrixXcd D = lu.solve(Lz);
    const double scale = Az.norm() * D.norm() + Lz.norm();
    if (!D.allFinite() || (Az * D - Lz).norm() > 1e-8 * (scale + 1e-300))
        throw SingularityError("delta_symbol: A + zeta a e_m^T is singular", zeta);
    return D;
}

Eigen::MatrixXcd delta_symbol_rank1(const BlockTableau& tab, Complex zeta) {
    if (!(std::abs(zeta) < 1.0))
        throw ArgumentError("delta_symbol_rank1: requires |zeta| < 1");
    const int m = tab.size();
    // (A + zeta a e_m^T)^{-1} = A^{-1} - zeta A^{-1} a e_m^T A^{-1} / (1 + zeta e_m^T A^{-1} a)
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(tab.A);
    const Eigen::VectorXd Ainv_a = lu.solve(tab.a);
    const Complex denom = 1.0 + zeta * Ainv_a(m - 1);
    if (std::abs(denom) < 1e-14)
        throw SingularityError("delta_symbol_rank1: rank-1 update denominator vanished", zeta);
    Eigen::MatrixXcd Lz = tab.L.cast<Complex>();
    Lz.col(m - 1) += zeta * tab.l.cast<Complex>();
    const Eigen::MatrixXcd AinvLz = lu.solve(Lz.real()) +
                                    Complex(0.0, 1.0) * lu.solve(Lz.imag());
    return AinvLz - (zeta / denom) * Ainv_a.cast<Complex>() * AinvLz.row(m - 1);
}

SymbolEvaluation eig_symbol(const Eigen::MatrixXcd& delta) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(delta);
    if (eig.info() != Eigen::Success)
        throw NumericError("eig_symbol: eigensolver failed to converge");
    SymbolEvaluation ev;
    ev.delta = delta;
    ev.eigvals = eig.eigenvalues();
    ev.eigvecs = eig.eigenvectors();
    const Eigen::MatrixXcd Pinv = ev.eigvecs.inverse();
    const Eigen::MatrixXcd recon = ev.eigvecs * ev.eigvals.asDiagonal() * Pinv;
    const double resid = (recon - delta).norm();
    const double scale = delta.norm() + 1e-300;
    if (resid > 1e-8 * scale)
        throw NumericError("eig_symbol: near-defective symbol, reconstruction residual " +
                           std::to_string(resid / scale));
    ev.eig_condition = spectral_cond(ev.eigvecs);
    // rows of P^{-1} are the (unnormalized) left eigenvectors with
    // y_i^H x_i = 1, so kappa_i reduces to ||x_i|| ||row_i(P^{-1})||
    const int n = static_cast<int>(delta.rows());
    ev.eigval_conditions.resize(n);
    for (int i = 0; i < n; ++i)
        ev.eigval_conditions(i) = ev.eigvecs.col(i).norm() * Pinv.row(i).norm();
    return ev;
}

Eigen::MatrixXcd kernel_matrix_function(const Kernel& kernel, const SymbolEvaluation& eval,
                                        double h) {
    if (!(h > 0.0)) throw ArgumentError("kernel_matrix_function: h must be positive");
    const int m = static_cast<int>(eval.eigvals.size());
    Eigen::VectorXcd kd(m);
    for (int i = 0; i < m; ++i) {
        const Complex point = eval.eigvals(i) / h;
        const double slack = 1e-9 * (1.0 + std::abs(point));
        if (point.real() < kernel.sigma - slack)
            throw KernelDomainError("kernel_matrix_function: eigenvalue/h leaves the kernel's "
                                    "half-plane of analyticity", point);
        kd(i) = kernel(point);
    }
    return eval.eigvecs * kd.asDiagonal() * eval.eigvecs.inverse();
}

Eigen::MatrixXcd matrix_function_schur(
    const Eigen::MatrixXcd& matrix,
    const std::function<Complex(Complex)>& f) {
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(matrix);
    if (schur.info() != Eigen::Success)
        throw NumericError("matrix_function_schur: Schur decomposition failed");
    const Eigen::MatrixXcd& T = schur.matrixT();
    const Eigen::MatrixXcd& Q = schur.matrixU();
    const int n = static_cast<int>(T.rows());

    // Parlett recurrence on the triangular factor.
    Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) F(i, i) = f(T(i, i));
    for (int d = 1; d < n; ++d) {
        for (int i = 0; i + d < n; ++i) {
            const int j = i + d;
            const Complex den = T(j, j) - T(i, i);
            if (std::abs(den) < 1e-12 * (std::abs(T(i, i)) + std::abs(T(j, j)) + 1.0))
                throw NumericError("matrix_function_schur: clustered eigenvalues, Parlett "
                                   "recurrence is unstable here");
            Complex s = T(i, j) * (F(j, j) - F(i, i));
            for (int k = i + 1; k < j; ++k) s += T(i, k) * F(k, j) - F(i, k) * T(k, j);
            F(i, j) = s / den;
        }
    }
    return Q * F * Q.adjoint();
}

}  // namespace bgacq
