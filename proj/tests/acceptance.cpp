// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line. Criteria 1 and 2 carry sub-entries that contradict the
// construction every other table entry confirms; they are asserted as
// stated and reported honestly.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <vector>

#include "bgacq/harness.hpp"
#include "bgacq/kernels.hpp"
#include "bgacq/oracle.hpp"
#include "bgacq/quadrature.hpp"
#include "bgacq/stability.hpp"
#include "bgacq/symbol.hpp"
#include "doctest.h"

using namespace bgacq;
using Cx = std::complex<double>;

namespace {

struct Verdict {
    bool ok = true;
    void merge(bool b) { ok = ok && b; }
};

void report(int criterion, const char* title, bool ok) {
    std::printf("[acceptance] criterion %2d (%s): %s\n", criterion, title,
                ok ? "PASS" : "FAIL");
    std::fflush(stdout);
}

bool match_2sig(double computed, double printed) {
    if (printed == 0.0) return std::abs(computed) < 1e-14;
    const double ulp = std::pow(10.0, std::floor(std::log10(std::abs(printed))) - 1.0);
    return std::abs(computed - printed) <= 0.5 * ulp + 1e-15 * std::abs(printed);
}

bool within_factor(double computed, double reference, double factor) {
    return computed > reference / factor && computed < reference * factor;
}

std::string out_dir(const char* tag) {
    auto p = std::filesystem::temp_directory_path() / "bgacq_acceptance" / tag;
    std::filesystem::create_directories(p);
    return p.string();
}

}  // namespace

TEST_CASE("criterion 1: Table 2 |R(inf)| values") {
    const std::vector<std::tuple<int, int, int, double>> table = {
        {0, 1, 3, 5.9e-1},  {0, 1, 12, 4.5e-3}, {0, 2, 4, 4.3e-2},  {0, 2, 12, 4.4e-4},
        {1, 2, 5, 7.4e-1},  {1, 2, 12, 7.6e-2}, {0, 1, 24, 6.9e-6}, {1, 2, 24, 1.5e-3}};
    Verdict v;
    for (const auto& [k1, k2, m, printed] : table) {
        const double r = stability_at_infinity(assemble_tableau({k1, k2, m}));
        const bool ok = match_2sig(r, printed);
        std::printf("    (%d,%d,%d): computed %.4e, reference %.1e -> %s\n", k1, k2, m, r, printed,
                    ok ? "match" : "MISMATCH");
        v.merge(ok);
        CHECK_MESSAGE(ok, "(", k1, ",", k2, ",", m, ") computed ", r, " vs reference ", printed);
    }
    report(1, "Table 2 reproduction", v.ok);
}

TEST_CASE("criterion 2: Table 3 minimum block sizes") {
    const std::vector<std::pair<std::pair<int, int>, int>> table = {
        {{0, 1}, 3}, {{0, 2}, 4}, {{1, 2}, 5}, {{1, 3}, 6},
        {{2, 3}, 7}, {{2, 4}, 10}, {{3, 4}, 13}, {{3, 5}, 13}};
    Verdict v;
    for (const auto& [pair, expected] : table) {
        const auto m = min_block_size(pair.first, pair.second, 20);
        const bool ok = m.has_value() && *m == expected;
        std::printf("    (%d,%d): computed %s, reference %d -> %s\n", pair.first, pair.second,
                    m ? std::to_string(*m).c_str() : "not-found", expected,
                    ok ? "match" : "MISMATCH");
        v.merge(ok);
        CHECK_MESSAGE(ok, "(", pair.first, ",", pair.second, ") expected m*=", expected);
    }
    report(2, "Table 3 reproduction", v.ok);
}

TEST_CASE("criterion 3: Table 1 generator spectra") {
    const std::map<std::pair<int, int>, std::vector<Cx>> table = {
        {{0, 1}, {{5.5, 0.0}, {3.6, 2.8}, {3.6, -2.8}}},
        {{0, 2}, {{5.7, 1.1}, {5.7, -1.1}, {3.3, 4.9}, {3.3, -4.9}}},
        {{1, 2}, {{3.7, 7.0}, {3.7, -7.0}, {7.8, 0.0}, {6.3, 2.9}, {6.3, -2.9}}}};
    Verdict v;
    for (const auto& [pair, printed] : table) {
        const int m = pair.first + pair.second + 2;
        auto spec = generator_spectrum(assemble_tableau({pair.first, pair.second, m}));
        bool all = spec.size() == printed.size();
        std::vector<bool> used(spec.size(), false);
        for (const Cx& p : printed) {
            bool found = false;
            for (std::size_t i = 0; i < spec.size(); ++i) {
                if (!used[i] && match_2sig(spec[i].real(), p.real()) &&
                    match_2sig(spec[i].imag(), p.imag())) {
                    used[i] = true;
                    found = true;
                    break;
                }
            }
            all = all && found;
        }
        v.merge(all);
        CHECK_MESSAGE(all, "spectrum of (", pair.first, ",", pair.second, ",", m,
                      ") mismatches Table 1");
    }
    report(3, "Table 1 spot checks", v.ok);
}

TEST_CASE("criterion 4: Example 1 convergence at mu = -0.2") {
    ExperimentConfig cfg;
    cfg.id = "example1";
    cfg.kernel = "periodic_sum:mu=-0.2";
    cfg.out_dir = out_dir("c4");
    const auto reports = run_example1(cfg);
    REQUIRE(reports.size() == 1);
    const auto& rows = reports[0].rows;
    Verdict v;
    for (const auto& row : rows) {
        if (row.N >= 32) {
            const bool ok = row.estimated_order >= 2.9 && row.estimated_order <= 3.3;
            v.merge(ok);
            CHECK_MESSAGE(ok, "order at N=", row.N, " was ", row.estimated_order);
        }
        if (row.N == 256) {
            const bool ok = within_factor(row.max_block_error, 7.0e-9, 5.0);
            v.merge(ok);
            CHECK_MESSAGE(ok, "error at N=256 was ", row.max_block_error);
        }
    }
    report(4, "Example 1 Table 4 order/error", v.ok);
}

TEST_CASE("criterion 5: Theorem-2 order reduction at mu = 1.8") {
    ExperimentConfig cfg;
    cfg.id = "example1";
    cfg.kernel = "periodic_sum:mu=1.8";
    cfg.out_dir = out_dir("c5");
    const auto reports = run_example1(cfg);
    REQUIRE(reports.size() == 1);
    Verdict v;
    for (const auto& row : reports[0].rows) {
        if (row.N >= 64) {
            const bool ok = row.estimated_order >= 2.0 && row.estimated_order <= 2.4;
            v.merge(ok);
            CHECK_MESSAGE(ok, "order at N=", row.N, " was ", row.estimated_order);
        }
    }
    report(5, "Example 1 Table 5 order reduction", v.ok);
}

TEST_CASE("criterion 6: Example 2 MBGACQ orders and errors") {
    ExperimentConfig cfg;
    cfg.id = "example2";
    cfg.out_dir = out_dir("c6");
    const auto reports = run_example2(cfg);
    REQUIRE(reports.size() == 6);  // 3 schemes x 2 alphas

    const std::map<std::pair<int, int>, std::pair<double, double>> bands = {
        {{0, 1}, {2.8, 3.4}}, {{0, 2}, {3.8, 4.2}}, {{1, 2}, {4.4, 5.4}}};
    const std::map<double, std::array<std::array<double, 5>, 3>> reference = {
        {0.5,
         {{{1.2e-2, 3.4e-4, 6.7e-5, 2.3e-5, 1.1e-5},
           {7.3e-4, 8.9e-6, 1.1e-6, 3.0e-7, 1.1e-7},
           {1.3e-6, 1.1e-8, 8.0e-10, 1.4e-10, 3.8e-11}}}},
        {0.9,
         {{{1.5e-2, 4.3e-4, 8.7e-5, 3.0e-5, 1.4e-5},
           {1.3e-3, 1.5e-5, 2.0e-6, 5.1e-7, 1.9e-7},
           {1.7e-6, 1.7e-8, 1.5e-9, 2.9e-10, 8.0e-11}}}}};
    const std::array<std::pair<int, int>, 3> scheme_order = {{{0, 1}, {0, 2}, {1, 2}}};

    Verdict v;
    std::size_t idx = 0;
    for (const double alpha : {0.5, 0.9}) {
        for (int s = 0; s < 3; ++s, ++idx) {
            const auto& rep = reports[idx];
            const auto band = bands.at(scheme_order[s]);
            for (std::size_t r = 0; r < rep.rows.size(); ++r) {
                const auto& row = rep.rows[r];
                if (r > 0) {
                    const bool ok =
                        row.estimated_order >= band.first && row.estimated_order <= band.second;
                    v.merge(ok);
                    CHECK_MESSAGE(ok, rep.label, " order at N=", row.N, " was ",
                                  row.estimated_order);
                }
                const double ref_err = reference.at(alpha)[s][r];
                const bool oke = within_factor(row.max_block_error, ref_err, 5.0);
                v.merge(oke);
                CHECK_MESSAGE(oke, rep.label, " error at N=", row.N, " was ",
                              row.max_block_error, " vs reference ", ref_err);
            }
        }
    }
    report(6, "Example 2 Tables 6-7", v.ok);
}

TEST_CASE("criterion 7: corrected CQ agrees with the time-domain oracle") {
    struct KernelCase {
        Kernel kernel;
        std::function<double(double)> time_kernel;
        double beta;
    };
    std::vector<KernelCase> cases;
    cases.push_back({exp_decay_kernel(), [](double s) { return std::exp(-s); }, 0.0});
    for (const double alpha : {0.3, 0.5, 0.9}) {
        const double lg = std::lgamma(alpha);
        cases.push_back({fractional_kernel(alpha),
                         [alpha, lg](double s) {
                             return std::exp((alpha - 1.0) * std::log(s) - lg);
                         },
                         alpha - 1.0});
    }
    const auto g = [](double t) { return std::sin(t) + 1.0; };
    const double T = 1.0;

    Verdict v;
    std::mt19937 rng(2024);
    for (const auto& kc : cases) {
        for (const SchemeParams p : {SchemeParams{0, 1, 3}, SchemeParams{0, 2, 4}}) {
            const BlockTableau tab = assemble_tableau(p);
            std::vector<double> errs;
            for (const int N : {8, 16, 32}) {
                const Grid grid = Grid::make(T, N, p.m);
                const WeightTable wt = compute_weights(tab, kc.kernel, grid.h, N);
                const Eigen::MatrixXd U =
                    corrected_apply(wt, kc.kernel, grid, sample_function(grid, g));
                std::uniform_int_distribution<int> pick_n(0, N - 1), pick_i(1, p.m);
                double worst = 0.0;
                for (int trial = 0; trial < 10; ++trial) {
                    const int n = pick_n(rng), i = pick_i(rng);
                    const double t = grid.fine(n, i);
                    const double oracle =
                        oracle_direct_convolution(kc.time_kernel, g, t, 1e-12, kc.beta);
                    worst = std::max(worst, std::abs(U(n, i - 1) - oracle));
                }
                errs.push_back(worst);
            }
            const double slope = std::log2(errs[0] / errs[2]) / 2.0;
            const bool ok = slope >= p.k1 + p.k2 + 1.7;
            v.merge(ok);
            CHECK_MESSAGE(ok, kc.kernel.name, " scheme (", p.k1, ",", p.k2, ",", p.m,
                          ") slope ", slope);
        }
    }
    report(7, "oracle equivalence at random nodes", v.ok);
}

TEST_CASE("criterion 8: polynomial exactness of rule and CQ") {
    Verdict v;
    // quadrature rule rows, all three regimes
    for (const SchemeParams p : {SchemeParams{0, 1, 3}, SchemeParams{1, 2, 5}}) {
        const BlockTableau tab = assemble_tableau(p);
        const Grid grid = Grid::make(1.3, 5, p.m);
        for (int deg = 0; deg <= p.k1 + p.k2 + 1; ++deg) {
            for (int n : {0, 4}) {
                for (int j = 0; j < p.m; ++j) {
                    double q = 0.0;
                    for (int c = 0; c <= p.m; ++c)
                        q += tab.exact[j][c].to_double() * std::pow(grid.fine(n, c), deg);
                    q *= grid.h;
                    const double exact = (std::pow(grid.fine(n, j + 1), deg + 1) -
                                          std::pow(grid.fine(n, j), deg + 1)) /
                                         (deg + 1);
                    const bool ok = std::abs(q - exact) <= 1e-12 * std::max(1.0, std::abs(exact));
                    v.merge(ok);
                    CHECK_MESSAGE(ok, "rule row ", j, " degree ", deg);
                }
            }
        }
    }
    // 1/lambda CQ on monomials: plain for degree >= 1, corrected for all
    // degrees (g(0) != 0 needs the corrected path per the g(0) convention)
    const Kernel k = integration_kernel();
    for (const SchemeParams p : {SchemeParams{0, 1, 3}, SchemeParams{1, 2, 5}}) {
        const BlockTableau tab = assemble_tableau(p);
        const Grid grid = Grid::make(2.0, 8, p.m);
        const WeightTable wt = compute_weights(tab, k, grid.h, grid.N);
        for (int deg = 0; deg <= p.k1 + p.k2 + 1; ++deg) {
            const SampleVector s =
                sample_function(grid, [deg](double t) { return std::pow(t, deg); });
            const Eigen::MatrixXd Uplain = forward_apply(wt, s);
            const Eigen::MatrixXd Ucorr = corrected_apply(wt, k, grid, s);
            for (int n = 0; n < grid.N; ++n)
                for (int i = 1; i <= grid.m; ++i) {
                    const double t = grid.fine(n, i);
                    const double exact = std::pow(t, deg + 1) / (deg + 1);
                    // near t = 0 the 1e-10 relative window falls below the
                    // double rounding floor; measure against the O(1) scale
                    const double tol = 1e-10 * std::max(1.0, std::abs(exact));
                    if (deg >= 1) {
                        const bool ok = std::abs(Uplain(n, i - 1) - exact) <= tol;
                        v.merge(ok);
                        CHECK_MESSAGE(ok, "plain CQ degree ", deg, " at t=", t);
                    }
                    const bool okc = std::abs(Ucorr(n, i - 1) - exact) <= tol;
                    v.merge(okc);
                    CHECK_MESSAGE(okc, "corrected CQ degree ", deg, " at t=", t);
                }
        }
    }
    report(8, "polynomial exactness suite", v.ok);
}

TEST_CASE("criterion 9: Lemma-2 series identity") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Verdict v;
    for (const SchemeParams p : {SchemeParams{0, 1, 3}, SchemeParams{1, 2, 5}}) {
        const BlockTableau tab = assemble_tableau(p);
        const int m = p.m;
        for (int trial = 0; trial < 20; ++trial) {
            const Cx z(-0.1 - 4.9 * uni(rng), -5.0 + 10.0 * uni(rng));
            const Cx zeta = (0.05 + 0.45 * uni(rng)) * std::exp(Cx(0.0, 2.0 * M_PI * uni(rng)));
            const Eigen::MatrixXcd D = delta_symbol(tab, zeta);
            const Eigen::MatrixXcd direct = (D - z * Eigen::MatrixXcd::Identity(m, m)).inverse();
            const Eigen::MatrixXcd LzA = tab.L.cast<Cx>() - z * tab.A.cast<Cx>();
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(LzA);
            const Eigen::VectorXcd bz = lu.solve(z * tab.a.cast<Cx>() - tab.l.cast<Cx>());
            const Cx R = bz(m - 1);
            Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(m, m);
            B.col(m - 1) = bz;
            const Eigen::MatrixXcd SA = lu.solve(tab.A.cast<Cx>());
            const Eigen::VectorXcd Sa = lu.solve(tab.a.cast<Cx>());
            Eigen::MatrixXcd SaE = Eigen::MatrixXcd::Zero(m, m);
            SaE.col(m - 1) = Sa;
            Eigen::MatrixXcd series = SA + zeta * (SaE + B * SA);
            const Eigen::MatrixXcd BSA = B * SA;
            Eigen::MatrixXcd BSaE = Eigen::MatrixXcd::Zero(m, m);
            BSaE.col(m - 1) = B * Sa;
            Cx zj = zeta * zeta, Rj = R, Rjm1(1.0, 0.0);
            for (int j = 2; j < 6000; ++j) {
                const Eigen::MatrixXcd add = zj * (Rj * BSA + Rjm1 * BSaE);
                series += add;
                if (add.norm() < 1e-16 * series.norm()) break;
                zj *= zeta;
                Rjm1 = Rj;
                Rj *= R;
            }
            const bool ok = (series - direct).norm() <= 1e-10 * direct.norm();
            v.merge(ok);
            CHECK_MESSAGE(ok, "trial ", trial, " scheme m=", m);
        }
    }
    report(9, "Lemma 2 series identity", v.ok);
}

TEST_CASE("criterion 10: dissipation expansion coefficients") {
    Verdict v;
    {
        std::vector<double> hs;
        for (int i = 0; i < 8; ++i) hs.push_back(0.01 * std::pow(10.0, i / 7.0));
        const DissipationExpansion d = dissipation_expansion(assemble_tableau({0, 1, 3}), hs);
        const bool ok = d.order_real == 3 && within_factor(d.coeff_real, 5.1e-4, 1.2);
        v.merge(ok);
        CHECK_MESSAGE(ok, "(0,1,3): p=", d.order_real, " c=", d.coeff_real);
    }
    {
        std::vector<double> hs;
        for (int i = 0; i < 8; ++i) hs.push_back(0.04 * std::pow(2.5, i / 7.0));
        const DissipationExpansion d = dissipation_expansion(assemble_tableau({1, 2, 5}), hs);
        const bool ok = d.order_real == 5 && within_factor(d.coeff_real, 4.9e-7, 1.2);
        v.merge(ok);
        CHECK_MESSAGE(ok, "(1,2,5): p=", d.order_real, " c=", d.coeff_real);
    }
    report(10, "dissipation leading coefficients", v.ok);
}

TEST_CASE("criterion 11: Example 3 equation solve and round trip") {
    Verdict v;
    {
        ExperimentConfig cfg;
        cfg.id = "example3";
        cfg.out_dir = out_dir("c11");
        const Example3Result res = run_example3(cfg);
        double bga = -1.0, bdf2 = -1.0;
        for (const auto& me : res.methods) {
            if (me.method == "bgacq_02_4") bga = me.max_error;
            if (me.method == "bdf2") bdf2 = me.max_error;
        }
        const bool ok = bga >= 0.0 && bdf2 >= 0.0 && bga < bdf2;
        v.merge(ok);
        CHECK_MESSAGE(ok, "BGACQ_{0,2}^4 max err ", bga, " vs BDF2 ", bdf2);
    }
    {
        const Kernel k = exp_decay_kernel();
        const SchemeParams p{0, 1, 3};
        const Grid grid = Grid::make(2.0, 32, p.m);
        const WeightTable wt = compute_weights(assemble_tableau(p), k, grid.h, grid.N);
        const SampleVector s =
            sample_function(grid, [](double t) { return std::cos(t) + t; });
        SampleVector rhs = s;
        rhs.blocks = forward_apply(wt, s);
        const Eigen::MatrixXd back = solve_convolution_equation(wt, rhs);
        const bool ok = (back - s.blocks).cwiseAbs().maxCoeff() <= 1e-8;
        v.merge(ok);
        CHECK_MESSAGE(ok, "round trip residual ", (back - s.blocks).cwiseAbs().maxCoeff());
    }
    report(11, "Example 3 solve + round trip", v.ok);
}

TEST_CASE("criterion 12: contour robustness under L doubling") {
    const BlockTableau tab = assemble_tableau({0, 1, 3});
    const Kernel k = periodic_sum_kernel(-0.2);
    const int N = 64;
    const double h = 2.0 / N;
    ContourOptions five, ten;
    ten.l_multiplier = 10;
    const WeightTable w5 = compute_weights(tab, k, h, N, five);
    const WeightTable w10 = compute_weights(tab, k, h, N, ten);
    double worst = 0.0;
    for (int j = 0; j <= N; ++j) {
        const double denom = std::max(w10.weights[j].norm(), 1e-300);
        worst = std::max(worst, (w5.weights[j] - w10.weights[j]).norm() / denom);
    }
    const bool ok = worst < 1e-8;
    CHECK_MESSAGE(ok, "max relative weight change ", worst);
    report(12, "contour parameter robustness", ok);
}
