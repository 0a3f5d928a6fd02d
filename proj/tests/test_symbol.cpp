#include <cmath>
#include <complex>
#include <random>

#include "bgacq/errors.hpp"
#include "bgacq/stability.hpp"
#include "bgacq/symbol.hpp"
#include "doctest.h"

using namespace bgacq;
using Cx = std::complex<double>;

TEST_CASE("delta symbol at zeta = 0 is A^{-1} L") {
    const BlockTableau tab = assemble_tableau({0, 1, 3});
    const Eigen::MatrixXcd D = delta_symbol(tab, 0.0);
    const Eigen::MatrixXd expect = tab.A.lu().solve(tab.L);
    CHECK((D - expect.cast<Cx>()).norm() < 1e-13 * expect.norm());
    CHECK_THROWS_AS(delta_symbol(tab, Cx(1.0, 0.0)), ArgumentError);
    CHECK_THROWS_AS(delta_symbol(tab, Cx(0.8, 0.7)), ArgumentError);
}

TEST_CASE("delta symbol conjugate symmetry and rank-1 fast path") {
    const BlockTableau tab = assemble_tableau({1, 2, 5});
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double rho = 0.98 * uni(rng);
        const double theta = 2.0 * M_PI * uni(rng);
        const Cx zeta = rho * std::exp(Cx(0.0, theta));
        const Eigen::MatrixXcd D = delta_symbol(tab, zeta);
        const Eigen::MatrixXcd Dc = delta_symbol(tab, std::conj(zeta));
        CHECK((Dc - D.conjugate()).norm() < 1e-12 * (1.0 + D.norm()));
        const Eigen::MatrixXcd Dr = delta_symbol_rank1(tab, zeta);
        CHECK((Dr - D).norm() < 1e-12 * (1.0 + D.norm()));
    }
}

TEST_CASE("symbol spectrum sits in the right half-plane for certified schemes") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (const SchemeParams p : {SchemeParams{0, 1, 3}, SchemeParams{0, 2, 4}}) {
        const BlockTableau tab = assemble_tableau(p);
        for (int trial = 0; trial < 100; ++trial) {
            const Cx zeta = (0.999 * uni(rng)) * std::exp(Cx(0.0, 2.0 * M_PI * uni(rng)));
            const SymbolEvaluation ev = eig_symbol(delta_symbol(tab, zeta));
            for (int i = 0; i < ev.eigvals.size(); ++i) CHECK(ev.eigvals(i).real() > 0.0);
            const Eigen::MatrixXcd recon =
                ev.eigvecs * ev.eigvals.asDiagonal() * ev.eigvecs.inverse();
            CHECK((recon - ev.delta).norm() <= 1e-10 * ev.delta.norm());
        }
    }
}

TEST_CASE("kernel matrix function is conjugate symmetric in zeta") {
    const BlockTableau tab = assemble_tableau({0, 1, 3});
    Kernel frac;
    frac.name = "fr";
    frac.transfer = [](Cx z) { return std::pow(z, -0.3); };
    frac.sigma = 1e-8;
    const double h = 0.2;
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Cx zeta = (0.9 * uni(rng)) * std::exp(Cx(0.0, 2.0 * M_PI * uni(rng)));
        const Eigen::MatrixXcd F = kernel_matrix_function(frac, eig_symbol(delta_symbol(tab, zeta)), h);
        const Eigen::MatrixXcd Fc =
            kernel_matrix_function(frac, eig_symbol(delta_symbol(tab, std::conj(zeta))), h);
        CHECK((Fc - F.conjugate()).norm() <= 1e-11 * (1.0 + F.norm()));
    }
}

TEST_CASE("eig_symbol on a diagonal matrix") {
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2, 2);
    D(0, 0) = 1.0;
    D(1, 1) = Cx(0.0, 2.0);
    const SymbolEvaluation ev = eig_symbol(D);
    CHECK(ev.eig_condition == doctest::Approx(1.0).epsilon(1e-10));
    std::vector<Cx> vals = {ev.eigvals(0), ev.eigvals(1)};
    const bool found = (std::abs(vals[0] - Cx(1.0, 0.0)) < 1e-14 &&
                        std::abs(vals[1] - Cx(0.0, 2.0)) < 1e-14) ||
                       (std::abs(vals[1] - Cx(1.0, 0.0)) < 1e-14 &&
                        std::abs(vals[0] - Cx(0.0, 2.0)) < 1e-14);
    CHECK(found);
}

TEST_CASE("eig_symbol recovers a constructed spectrum") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixXcd P(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) P(r, c) = Cx(uni(rng), uni(rng));
    Eigen::VectorXcd d(3);
    d << Cx(1.0, 0.5), Cx(-2.0, 1.0), Cx(0.3, -3.0);
    const Eigen::MatrixXcd M = P * d.asDiagonal() * P.inverse();
    const SymbolEvaluation ev = eig_symbol(M);
    for (int i = 0; i < 3; ++i) {
        double best = 1e300;
        for (int j = 0; j < 3; ++j) best = std::min(best, std::abs(ev.eigvals(j) - d(i)));
        CHECK(best < 1e-10);
    }
    const Eigen::MatrixXcd recon = ev.eigvecs * ev.eigvals.asDiagonal() * ev.eigvecs.inverse();
    CHECK((recon - M).norm() <= 1e-10 * M.norm());
}

TEST_CASE("eigenvector conditioning at a mid-radius contour point") {
    const BlockTableau tab = assemble_tableau({0, 1, 3});
    const SymbolEvaluation ev = eig_symbol(delta_symbol(tab, 0.9 * std::exp(Cx(0.0, 0.7))));
    CHECK(ev.eig_condition >= 1.0);
    CHECK(ev.eig_condition <= 2.0);
    CHECK(ev.eig_condition < 1e3);
}

TEST_CASE("eigenvalue condition numbers stay near one on the contour") {
    // measured over full weight contours: [1.03, 1.25] for (0,1,3),
    // [1.02, 1.58] for (0,2,4), [1.04, 2.03] for (1,2,5)
    for (const SchemeParams p :
         {SchemeParams{0, 1, 3}, SchemeParams{0, 2, 4}, SchemeParams{1, 2, 5}}) {
        const BlockTableau tab = assemble_tableau(p);
        for (int l = 0; l <= 10; ++l) {
            const Cx zeta = 0.93 * std::exp(Cx(0.0, M_PI * l / 10.0));
            const SymbolEvaluation ev = eig_symbol(delta_symbol(tab, zeta));
            REQUIRE(ev.eigval_conditions.size() == p.m);
            for (int i = 0; i < p.m; ++i) {
                CHECK(ev.eigval_conditions(i) >= 1.0 - 1e-12);
                CHECK(ev.eigval_conditions(i) <= 2.1);
            }
        }
    }
}

TEST_CASE("kernel matrix functions of simple transfers") {
    const BlockTableau tab = assemble_tableau({0, 1, 3});
    const double h = 0.25;
    const SymbolEvaluation ev = eig_symbol(delta_symbol(tab, Cx(0.4, 0.3)));

    Kernel constant;
    constant.name = "one";
    constant.transfer = [](Cx) { return Cx(1.0, 0.0); };
    constant.sigma = -1e300;
    const Eigen::MatrixXcd I = kernel_matrix_function(constant, ev, h);
    CHECK((I - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);

    Kernel inv;
    inv.name = "integration";
    inv.transfer = [](Cx z) { return 1.0 / z; };
    inv.sigma = 1e-8;
    const Eigen::MatrixXcd F = kernel_matrix_function(inv, ev, h);
    const Eigen::MatrixXcd expect = h * ev.delta.inverse();
    CHECK((F - expect).norm() < 1e-10 * expect.norm());

    Kernel invsqrt;
    invsqrt.name = "halfinv";
    invsqrt.transfer = [](Cx z) { return std::pow(z, -0.5); };
    invsqrt.sigma = 1e-8;
    const SymbolEvaluation ev0 = eig_symbol(delta_symbol(tab, 0.0));
    const Eigen::MatrixXcd G = kernel_matrix_function(invsqrt, ev0, h);
    const Eigen::MatrixXcd G2 = G * G;
    const Eigen::MatrixXcd expect2 = h * ev0.delta.inverse();
    CHECK((G2 - expect2).norm() < 1e-8 * expect2.norm());
}

TEST_CASE("kernel domain violations are reported with the offending point") {
    const BlockTableau tab = assemble_tableau({0, 1, 3});
    const SymbolEvaluation ev = eig_symbol(delta_symbol(tab, 0.0));
    Kernel k;
    k.name = "shifted";
    k.transfer = [](Cx z) { return 1.0 / z; };
    k.sigma = 1e6;  // far to the right of every eigenvalue/h
    CHECK_THROWS_AS(kernel_matrix_function(k, ev, 1.0), KernelDomainError);
}

TEST_CASE("Schur-Parlett route agrees with diagonalization") {
    const BlockTableau tab = assemble_tableau({0, 2, 4});
    const Cx zeta = 0.7 * std::exp(Cx(0.0, 1.1));
    const Eigen::MatrixXcd D = delta_symbol(tab, zeta);
    const double h = 0.1;
    Kernel frac;
    frac.name = "fr";
    frac.transfer = [](Cx z) { return std::pow(z, -0.5); };
    frac.sigma = 1e-8;
    const Eigen::MatrixXcd via_eig = kernel_matrix_function(frac, eig_symbol(D), h);
    const Eigen::MatrixXcd via_schur =
        matrix_function_schur(D, [&](Cx z) { return frac.transfer(z / h); });
    CHECK((via_eig - via_schur).norm() < 1e-9 * via_eig.norm());
}

TEST_CASE("Lemma-2 series representation of the shifted inverse") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (const SchemeParams p : {SchemeParams{0, 1, 3}, SchemeParams{1, 2, 5}}) {
        const BlockTableau tab = assemble_tableau(p);
        const int m = p.m;
        for (int trial = 0; trial < 20; ++trial) {
            const Cx z(-0.1 - 4.9 * uni(rng), -5.0 + 10.0 * uni(rng));
            const Cx zeta = (0.05 + 0.45 * uni(rng)) * std::exp(Cx(0.0, 2.0 * M_PI * uni(rng)));
            const Eigen::MatrixXcd D = delta_symbol(tab, zeta);
            const Eigen::MatrixXcd direct =
                (D - z * Eigen::MatrixXcd::Identity(m, m)).inverse();

            const Eigen::MatrixXcd LzA = tab.L.cast<Cx>() - z * tab.A.cast<Cx>();
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(LzA);
            const Eigen::VectorXcd s_rhs = lu.solve(z * tab.a.cast<Cx>() - tab.l.cast<Cx>());
            const Cx R = s_rhs(m - 1);
            Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(m, m);
            B.col(m - 1) = s_rhs;
            const Eigen::MatrixXcd SA = lu.solve(tab.A.cast<Cx>());
            const Eigen::VectorXcd Sa = lu.solve(tab.a.cast<Cx>());
            Eigen::MatrixXcd SaE = Eigen::MatrixXcd::Zero(m, m);
            SaE.col(m - 1) = Sa;

            Eigen::MatrixXcd series = SA + zeta * (SaE + B * SA);
            const Eigen::MatrixXcd BSA = B * SA;
            Eigen::MatrixXcd BSaE = Eigen::MatrixXcd::Zero(m, m);
            BSaE.col(m - 1) = B * Sa;
            Cx zj = zeta * zeta;
            Cx Rj = R;       // R^{j-1} at j = 2
            Cx Rjm1(1.0, 0.0);  // R^{j-2} at j = 2
            for (int j = 2; j < 4000; ++j) {
                const Eigen::MatrixXcd add = zj * (Rj * BSA + Rjm1 * BSaE);
                series += add;
                if (add.norm() < 1e-16 * series.norm()) break;
                zj *= zeta;
                Rjm1 = Rj;
                Rj *= R;
            }
            CHECK((series - direct).norm() <= 1e-10 * direct.norm());
        }
    }
}
