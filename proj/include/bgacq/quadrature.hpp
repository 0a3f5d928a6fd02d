#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "bgacq/kernels.hpp"
#include "bgacq/scheme.hpp"

namespace bgacq {

/// Contour parameters for the weight computation. rho is derived from tol
/// as tol^{1/(6N)}; l_multiplier scales the contour point count L = mult*N.
struct ContourOptions {
    double tol = 1e-16;
    int l_multiplier = 5;
    int threads = 0;           // 0: hardware concurrency
    bool assume_certified = false;  // skip the Assumption-1 gate
};

/// Operator-valued CQ weights W_0..W_N with contour metadata. For
/// conjugate-symmetric kernels the imaginary parts are contour noise; they
/// are recorded in max_imag_leak and then discarded.
struct WeightTable {
    BlockTableau tab;
    std::string kernel_name;
    double h = 1.0;
    int N = 1;
    std::vector<Eigen::MatrixXcd> weights;
    double contour_rho = 0.0;
    int contour_points = 0;
    double max_imag_leak = 0.0;
    std::vector<double> eig_conditions;  // per evaluated contour point
};

/// Per-block samples G_n = (g(t_1^n) ... g(t_m^n)) plus g(0).
struct SampleVector {
    Grid grid;
    double g0 = 0.0;
    Eigen::MatrixXd blocks;  // N x m

    double first_block_node(int j) const;  // g(t_j^0), j = 0..m
};

/// Correction weights w_i^n of the modified quadrature at node (n, i),
/// attached to the samples at t_0^0..t_{k1+k2+1}^0.
struct CorrectionSet {
    int n = 0;
    int i = 1;
    Eigen::VectorXd w;
};

/// Computes K(Delta(rho e^{2 pi i l/L})/h) on the contour and recovers the
/// weights by an entrywise FFT. Refuses tableaux that fail Assumption-1
/// certification unless options.assume_certified is set.
WeightTable compute_weights(const BlockTableau& tab, const Kernel& kernel, double h, int N,
                            double tol = 1e-16);
WeightTable compute_weights(const BlockTableau& tab, const Kernel& kernel, double h, int N,
                            const ContourOptions& options);

SampleVector sample_function(const Grid& grid, const std::function<double(double)>& g);

/// U_n = sum_{j=0}^n W_j G_{n-j}; returns values at the fine nodes t_i^n.
Eigen::MatrixXd forward_apply(const WeightTable& wt, const SampleVector& samples);

/// Solves Eq. (Modeq) for the correction weights at node (n, i); the
/// Vandermonde system is solved in row-equilibrated form with a cached LU.
CorrectionSet correction_weights(const WeightTable& wt, const Kernel& kernel, const Grid& grid,
                                 int n, int i);

/// forward_apply plus the correction inner product against
/// (g(t_0^0), ..., g(t_{k1+k2+1}^0)).
Eigen::MatrixXd corrected_apply(const WeightTable& wt, const Kernel& kernel, const Grid& grid,
                                const SampleVector& samples);

/// Block forward substitution for int_0^t k(t-s) u(s) ds = g(t).
/// Refuses when cond(W_0) exceeds 1e12.
Eigen::MatrixXd solve_convolution_equation(const WeightTable& wt, const SampleVector& rhs);

/// Marches the BGA one-step recursion for y' = lambda y + g, y(0) = y0.
Eigen::MatrixXcd bga_ode_step_sweep(const BlockTableau& tab, std::complex<double> lambda,
                                    const std::function<double(double)>& g, const Grid& grid,
                                    std::complex<double> y0 = 0.0);

enum class LmMethod { BDF2, TR };

/// Scalar Lubich CQ weights from K(delta(zeta)/h) on the same contour;
/// comparison baselines only.
std::vector<double> baseline_lmcq_weights(LmMethod method, const Kernel& kernel, double h, int N,
                                          const ContourOptions& options = {});

/// Scalar discrete convolution / forward substitution on nodes t_n = n h.
std::vector<double> scalar_apply(const std::vector<double>& weights,
                                 const std::vector<double>& samples);
std::vector<double> scalar_solve(const std::vector<double>& weights,
                                 const std::vector<double>& rhs);

/// CSV dump/restore of a weight table (header + real/imag interleaved
/// row-major entries per W_j).
void write_weight_table(const WeightTable& wt, std::ostream& os);
WeightTable read_weight_table(std::istream& is);

}  // namespace bgacq
