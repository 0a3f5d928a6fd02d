#include "bgacq/quadrature.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "bgacq/errors.hpp"
#include "bgacq/stability.hpp"
#include "bgacq/symbol.hpp"

namespace bgacq {

namespace {

using Complex = std::complex<double>;

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(1, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

void check_grid_match(const WeightTable& wt, const Grid& grid) {
    if (grid.m != wt.tab.params.m || grid.N > wt.N ||
        std::abs(grid.h - wt.h) > 1e-12 * std::abs(wt.h))
        throw ArgumentError("weight table and sample grid disagree (m/h/N mismatch)");
}

/// One contour evaluation of K(Delta(zeta)/h), diagonalization first,
/// Schur-Parlett fallback for near-defective symbols.
Eigen::MatrixXcd contour_value(const BlockTableau& tab, const Kernel& kernel, Complex zeta,
                               double h, double* cond_out) {
    const Eigen::MatrixXcd D = delta_symbol(tab, zeta);
    try {
        const SymbolEvaluation ev = eig_symbol(D);
        if (cond_out) *cond_out = ev.eig_condition;
        return kernel_matrix_function(kernel, ev, h);
    } catch (const KernelDomainError&) {
        throw;  // domain violations are not a diagonalization problem
    } catch (const NumericError&) {
        if (cond_out) *cond_out = std::numeric_limits<double>::infinity();
        return matrix_function_schur(D, [&](Complex z) {
            const double slack = 1e-9 * (1.0 + std::abs(z) / h);
            if (z.real() / h < kernel.sigma - slack)
                throw KernelDomainError("compute_weights: Schur point leaves kernel domain", z / h);
            return kernel(z / h);
        });
    }
}

struct ContourData {
    std::vector<Eigen::MatrixXcd> values;  // length L
    std::vector<double> conds;             // evaluated points only
    double rho = 0.0;
};

ContourData evaluate_contour(const BlockTableau& tab, const Kernel& kernel, double h, int N,
                             const ContourOptions& opt,
                             const std::function<Complex(Complex)>* scalar_symbol) {
    const int L = opt.l_multiplier * N;
    const double rho = std::pow(opt.tol, 1.0 / (6.0 * N));
    ContourData data;
    data.rho = rho;
    data.values.assign(L, Eigen::MatrixXcd());
    const int upper = kernel.conjugate_symmetric ? L / 2 : L - 1;
    data.conds.assign(upper + 1, 1.0);

    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::mutex failure_mutex;
    parallel_for(upper + 1, opt.threads, [&](int l) {
        if (failed.load(std::memory_order_relaxed)) return;
        const Complex zeta = rho * std::exp(Complex(0.0, 2.0 * M_PI * l / L));
        try {
            if (scalar_symbol) {
                const Complex s = (*scalar_symbol)(zeta);
                data.values[l] = Eigen::MatrixXcd::Constant(1, 1, kernel(s / h));
            } else {
                data.values[l] = contour_value(tab, kernel, zeta, h, &data.conds[l]);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(failure_mutex);
            if (!failure) failure = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
        }
    });
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const KernelDomainError& e) {
            throw KernelDomainError(std::string("compute_weights: contour point hit the kernel's "
                                                "singularity set: ") + e.what(), e.point);
        }
    }
    if (kernel.conjugate_symmetric)
        for (int l = L / 2 + 1; l < L; ++l) data.values[l] = data.values[L - l].conjugate();
    return data;
}

// FFTW planning mutates global state; executing a plan on its own buffer is
// safe without the lock.
std::mutex& fftw_plan_mutex() {
    static std::mutex mtx;
    return mtx;
}

std::vector<Eigen::MatrixXcd> contour_to_weights(const ContourData& data, int N, int L, int m) {
    // W_j = (rho^{-j} / L) sum_l F_l e^{-2 pi i j l / L}, entrywise FFT
    std::vector<Eigen::MatrixXcd> W(N + 1, Eigen::MatrixXcd::Zero(m, m));
    std::vector<Complex> buf(L);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lk(fftw_plan_mutex());
        plan = fftw_plan_dft_1d(L, reinterpret_cast<fftw_complex*>(buf.data()),
                                reinterpret_cast<fftw_complex*>(buf.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            for (int l = 0; l < L; ++l) buf[l] = data.values[l](r, c);
            fftw_execute(plan);
            double scale = 1.0 / L;
            for (int j = 0; j <= N; ++j) {
                W[j](r, c) = buf[j] * scale;
                scale /= data.rho;
            }
        }
    }
    {
        std::lock_guard<std::mutex> lk(fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
    return W;
}

}  // namespace

WeightTable compute_weights(const BlockTableau& tab, const Kernel& kernel, double h, int N,
                            double tol) {
    ContourOptions opt;
    opt.tol = tol;
    return compute_weights(tab, kernel, h, N, opt);
}

WeightTable compute_weights(const BlockTableau& tab, const Kernel& kernel, double h, int N,
                            const ContourOptions& options) {
    if (!(h > 0.0)) throw ArgumentError("compute_weights: h must be positive");
    if (N < 1) throw ArgumentError("compute_weights: N must be >= 1");
    if (!(options.tol > 0.0) || options.tol >= 1.0)
        throw ArgumentError("compute_weights: tol must lie in (0, 1)");
    if (options.l_multiplier * static_cast<long>(N) < N + 1)
        throw ArgumentError("compute_weights: contour needs at least N+1 points");
    if (!options.assume_certified && !certify_assumption(tab).assumption_satisfied)
        throw ArgumentError("compute_weights: tableau fails Assumption-1 certification; "
                            "refusing to build weights");

    const int m = tab.size();
    const int L = options.l_multiplier * N;
    ContourData data = evaluate_contour(tab, kernel, h, N, options, nullptr);

    WeightTable wt;
    wt.tab = tab;
    wt.kernel_name = kernel.name;
    wt.h = h;
    wt.N = N;
    wt.contour_rho = data.rho;
    wt.contour_points = L;
    wt.eig_conditions = std::move(data.conds);
    wt.weights = contour_to_weights(data, N, L, m);

    if (kernel.conjugate_symmetric) {
        double leak = 0.0;
        for (const auto& Wj : wt.weights) leak = std::max(leak, Wj.imag().cwiseAbs().maxCoeff());
        wt.max_imag_leak = leak;
        for (auto& Wj : wt.weights) Wj.imag().setZero();
    }
    return wt;
}

double SampleVector::first_block_node(int j) const {
    if (j == 0) return g0;
    if (j < 1 || j > grid.m) throw ArgumentError("SampleVector: node index out of block 0");
    return blocks(0, j - 1);
}

SampleVector sample_function(const Grid& grid, const std::function<double(double)>& g) {
    SampleVector s;
    s.grid = grid;
    s.g0 = g(0.0);
    s.blocks.resize(grid.N, grid.m);
    for (int n = 0; n < grid.N; ++n)
        for (int j = 1; j <= grid.m; ++j) s.blocks(n, j - 1) = g(grid.fine(n, j));
    return s;
}

Eigen::MatrixXd forward_apply(const WeightTable& wt, const SampleVector& samples) {
    check_grid_match(wt, samples.grid);
    const int N = samples.grid.N;
    const int m = samples.grid.m;
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(N, m);
    for (int n = 0; n < N; ++n) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
        for (int j = 0; j <= n; ++j)
            acc.noalias() += wt.weights[j].real() * samples.blocks.row(n - j).transpose();
        U.row(n) = acc.transpose();
    }
    return U;
}

namespace {

/// Shared machinery of the correction path: plain CQ applied to the
/// monomial basis, exact monomial convolutions, and the row-equilibrated
/// Vandermonde factorization V = diag((h/m)^l) V0, V0[l][j] = j^l.
class CorrectionEngine {
public:
    CorrectionEngine(const WeightTable& wt, const Kernel& kernel, const Grid& grid)
        : wt_(wt), kernel_(kernel), grid_(grid), width_(wt.tab.params.stencil_width()) {
        if (!kernel.has_monomial_convolution())
            throw UnsupportedKernelError(
                "correction weights need kernel.monomial_convolution for l=0.." +
                std::to_string(width_ - 1) +
                "; supply it via custom_kernel or use plain forward_apply with g vanishing at 0");
        check_grid_match(wt, grid);

        Eigen::MatrixXd V0(width_, width_);
        for (int l = 0; l < width_; ++l)
            for (int j = 0; j < width_; ++j) V0(l, j) = std::pow(static_cast<double>(j), l);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(V0);
        const auto& sv = svd.singularValues();
        if (sv(0) / std::max(sv(sv.size() - 1), 1e-300) > 1e12)
            throw NumericError("correction weights: Vandermonde system condition exceeds 1e12");
        lu_.compute(V0);
        luT_.compute(V0.transpose());

        mono_cq_.reserve(width_);
        for (int l = 0; l < width_; ++l) {
            SampleVector s = sample_function(grid_, [l](double t) { return std::pow(t, l); });
            mono_cq_.push_back(forward_apply(wt_, s));
        }
    }

    /// Residual of plain CQ on the monomials at (n, i), scaled by (m/h)^l.
    Eigen::VectorXd scaled_residual(int n, int i) const {
        if (n < 0 || n >= grid_.N || i < 1 || i > grid_.m)
            throw ArgumentError("correction weights: node index out of grid");
        const double t = grid_.fine(n, i);
        Eigen::VectorXd r(width_);
        double scale = 1.0;  // (m/h)^l
        for (int l = 0; l < width_; ++l) {
            r(l) = (kernel_.monomial_convolution(l, t) - mono_cq_[l](n, i - 1)) * scale;
            scale *= grid_.m / grid_.h;
        }
        return r;
    }

    Eigen::VectorXd weights(int n, int i) const { return lu_.solve(scaled_residual(n, i)); }

    /// Interpolation coefficients of g at t_0^0..t_{w-1}^0 in the scaled
    /// variable s = t m/h; pairs with scaled_residual so that
    /// w_i . Ghat_0 = scaled_residual . coeffs.
    Eigen::VectorXd interp_coeffs(const SampleVector& samples) const {
        Eigen::VectorXd ghat(width_);
        for (int j = 0; j < width_; ++j) ghat(j) = samples.first_block_node(j);
        return luT_.solve(ghat);
    }

    int width() const { return width_; }

private:
    const WeightTable& wt_;
    const Kernel& kernel_;
    Grid grid_;
    int width_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_, luT_;
    std::vector<Eigen::MatrixXd> mono_cq_;
};

}  // namespace

CorrectionSet correction_weights(const WeightTable& wt, const Kernel& kernel, const Grid& grid,
                                 int n, int i) {
    CorrectionEngine engine(wt, kernel, grid);
    CorrectionSet cs;
    cs.n = n;
    cs.i = i;
    cs.w = engine.weights(n, i);
    return cs;
}

Eigen::MatrixXd corrected_apply(const WeightTable& wt, const Kernel& kernel, const Grid& grid,
                                const SampleVector& samples) {
    CorrectionEngine engine(wt, kernel, grid);
    const Eigen::VectorXd coeffs = engine.interp_coeffs(samples);
    Eigen::MatrixXd U = forward_apply(wt, samples);
    for (int n = 0; n < grid.N; ++n)
        for (int i = 1; i <= grid.m; ++i)
            U(n, i - 1) += engine.scaled_residual(n, i).dot(coeffs);
    return U;
}

Eigen::MatrixXd solve_convolution_equation(const WeightTable& wt, const SampleVector& rhs) {
    check_grid_match(wt, rhs.grid);
    const int N = rhs.grid.N;
    const int m = rhs.grid.m;
    const Eigen::MatrixXd W0 = wt.weights[0].real();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(W0);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) > 0.0 ? sv(0) / std::max(sv(sv.size() - 1), 1e-300)
                                    : std::numeric_limits<double>::infinity();
    if (cond > 1e12)
        throw NumericError("solve_convolution_equation: cond(W_0) = " + std::to_string(cond) +
                           " exceeds 1e12");
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(W0);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(N, m);
    for (int n = 0; n < N; ++n) {
        Eigen::VectorXd acc = rhs.blocks.row(n).transpose();
        for (int j = 1; j <= n; ++j)
            acc.noalias() -= wt.weights[j].real() * U.row(n - j).transpose();
        U.row(n) = lu.solve(acc).transpose();
    }
    return U;
}

Eigen::MatrixXcd bga_ode_step_sweep(const BlockTableau& tab, Complex lambda,
                                    const std::function<double(double)>& g, const Grid& grid,
                                    Complex y0) {
    if (grid.m != tab.params.m) throw ArgumentError("bga_ode_step_sweep: grid/tableau m mismatch");
    const int m = grid.m;
    const double h = grid.h;
    const Eigen::MatrixXcd M = tab.L.cast<Complex>() - h * lambda * tab.A.cast<Complex>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    {
        const Eigen::MatrixXcd probe = lu.solve(Eigen::MatrixXcd::Identity(m, m));
        if (!probe.allFinite() || (M * probe - Eigen::MatrixXcd::Identity(m, m)).norm() > 1e-8 * (1.0 + M.norm() * probe.norm()))
            throw SingularityError("bga_ode_step_sweep: L - h lambda A is singular", h * lambda);
    }
    const Eigen::VectorXcd step_vec = h * lambda * tab.a.cast<Complex>() - tab.l.cast<Complex>();

    Eigen::MatrixXcd Y(grid.N, m);
    Complex y_prev = y0;
    double g_prev = g(0.0);
    Eigen::VectorXd gn(m);
    for (int n = 0; n < grid.N; ++n) {
        for (int j = 1; j <= m; ++j) gn(j - 1) = g(grid.fine(n, j));
        const Eigen::VectorXcd rhs = step_vec * y_prev + h * g_prev * tab.a.cast<Complex>() +
                                     h * (tab.A * gn).cast<Complex>();
        const Eigen::VectorXcd yn = lu.solve(rhs);
        Y.row(n) = yn.transpose();
        y_prev = yn(m - 1);
        g_prev = gn(m - 1);
    }
    return Y;
}

std::vector<double> baseline_lmcq_weights(LmMethod method, const Kernel& kernel, double h, int N,
                                          const ContourOptions& options) {
    if (!(h > 0.0) || N < 1) throw ArgumentError("baseline_lmcq_weights: bad h or N");
    const std::function<Complex(Complex)> symbol =
        method == LmMethod::BDF2
            ? std::function<Complex(Complex)>(
                  [](Complex z) { return 1.5 - 2.0 * z + 0.5 * z * z; })
            : std::function<Complex(Complex)>([](Complex z) {
                  return 2.0 * (1.0 - z) / (1.0 + z);
              });
    BlockTableau dummy;  // scalar path does not touch the tableau
    dummy.params = SchemeParams{0, 0, 1};
    ContourOptions opt = options;
    opt.assume_certified = true;
    ContourData data = evaluate_contour(dummy, kernel, h, N, opt, &symbol);
    const int L = opt.l_multiplier * N;
    auto W = contour_to_weights(data, N, L, 1);
    std::vector<double> w(N + 1);
    for (int j = 0; j <= N; ++j) w[j] = W[j](0, 0).real();
    return w;
}

std::vector<double> scalar_apply(const std::vector<double>& weights,
                                 const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (weights.size() < n) throw ArgumentError("scalar_apply: not enough weights");
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j <= k; ++j) out[k] += weights[j] * samples[k - j];
    return out;
}

std::vector<double> scalar_solve(const std::vector<double>& weights,
                                 const std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    if (weights.size() < n) throw ArgumentError("scalar_solve: not enough weights");
    if (std::abs(weights[0]) < 1e-300) throw NumericError("scalar_solve: w_0 is zero");
    std::vector<double> u(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = rhs[k];
        for (std::size_t j = 1; j <= k; ++j) acc -= weights[j] * u[k - j];
        u[k] = acc / weights[0];
    }
    return u;
}

void write_weight_table(const WeightTable& wt, std::ostream& os) {
    const int m = wt.tab.params.m;
    os.precision(17);
    os << wt.tab.params.k1 << "," << wt.tab.params.k2 << "," << m << "," << wt.h << "," << wt.N
       << "," << wt.kernel_name << "," << wt.contour_rho << "," << wt.contour_points << "\n";
    for (int j = 0; j <= wt.N; ++j) {
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                os << wt.weights[j](r, c).real() << "," << wt.weights[j](r, c).imag();
                os << ((r == m - 1 && c == m - 1) ? "\n" : ",");
            }
        }
    }
}

WeightTable read_weight_table(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw ArgumentError("read_weight_table: empty stream");
    std::stringstream hs(header);
    std::string tok;
    auto next = [&]() {
        if (!std::getline(hs, tok, ',')) throw ArgumentError("read_weight_table: short header");
        return tok;
    };
    WeightTable wt;
    const int k1 = std::stoi(next());
    const int k2 = std::stoi(next());
    const int m = std::stoi(next());
    wt.h = std::stod(next());
    wt.N = std::stoi(next());
    wt.kernel_name = next();
    wt.contour_rho = std::stod(next());
    wt.contour_points = std::stoi(next());
    wt.tab = assemble_tableau({k1, k2, m});
    wt.weights.assign(wt.N + 1, Eigen::MatrixXcd::Zero(m, m));
    for (int j = 0; j <= wt.N; ++j) {
        std::string line;
        if (!std::getline(is, line)) throw ArgumentError("read_weight_table: truncated body");
        std::stringstream ls(line);
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                std::string re, im;
                if (!std::getline(ls, re, ',') || !std::getline(ls, im, ','))
                    throw ArgumentError("read_weight_table: short row");
                wt.weights[j](r, c) = Complex(std::stod(re), std::stod(im));
            }
        }
    }
    return wt;
}

}  // namespace bgacq
