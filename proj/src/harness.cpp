#include "bgacq/harness.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "bgacq/errors.hpp"
#include "bgacq/oracle.hpp"

namespace bgacq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_csv(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream os(std::filesystem::path(cfg.out_dir) / name);
    if (!os) throw ArgumentError("cannot open output file " + name + " under " + cfg.out_dir);
    os.precision(17);
    return os;
}

/// Max last-block error of a run against the nested self-reference values.
double last_block_error_vs_reference(const Eigen::MatrixXd& U, const Eigen::MatrixXd& Uref, int N,
                                     int Nref, int m) {
    const int ratio = Nref / N;
    double worst = 0.0;
    for (int i = 1; i <= m; ++i) {
        const int q = (N - 1) * m + i;        // global fine index, 1-based
        const int qr = ratio * q;
        const int nr = (qr - 1) / m, ir = (qr - 1) % m;
        worst = std::max(worst, std::abs(U(N - 1, i - 1) - Uref(nr, ir)));
    }
    return worst;
}

bool factor_match(double computed, double reference, double factor) {
    if (reference == 0.0) return std::abs(computed) < 1e-14;
    const double r = computed / reference;
    return r > 1.0 / factor && r < factor;
}

/// Two-significant-digit match (half a unit in the second printed digit).
bool match_2sig(double computed, double printed) {
    if (printed == 0.0) return std::abs(computed) < 1e-14;
    const double ulp = std::pow(10.0, std::floor(std::log10(std::abs(printed))) - 1.0);
    return std::abs(computed - printed) <= 0.5 * ulp + 1e-15 * std::abs(printed);
}

double g_example1(double t) { return std::exp(-0.4 * t) * std::pow(std::sin(t), 6); }
double g_example2(double t) { return (std::sin(t) + 1.0) * std::exp(0.8 * t); }
double g_example3(double t) { return std::exp(-100.0 * (t - 0.5) * (t - 0.5)); }
double g_example4(double t) {
    return std::exp(-10.0 * t) * std::pow(t, 6) / (1.0 + 25.0 * t * t);
}

// Paper Tables 4-5: last-block errors of BGACQ_{0,1}^3 at N = 2^3..2^8.
const std::map<double, std::array<double, 6>> kExample1Reference = {
    {-0.2, {2.8e-4, 3.1e-5, 3.8e-6, 4.6e-7, 5.7e-8, 7.0e-9}},
    {-0.8, {1.1e-4, 1.3e-5, 1.5e-6, 1.8e-7, 2.2e-8, 2.7e-9}},
    {-1.8, {9.8e-6, 5.3e-7, 5.0e-8, 5.3e-9, 6.2e-10, 7.9e-11}},
    {0.0, {3.6e-4, 3.7e-5, 4.3e-6, 5.2e-7, 6.4e-8, 7.9e-9}},
    {0.8, {1.2e-3, 1.2e-4, 1.6e-5, 2.1e-6, 2.6e-7, 3.2e-8}},
    {1.8, {4.3e-2, 5.6e-3, 9.6e-4, 1.9e-4, 4.3e-5, 9.1e-6}}};

// Paper Tables 6-7: MBGACQ last-block errors at N = {8,24,40,56,72}.
struct Example2ReferenceRow {
    SchemeParams scheme;
    std::array<double, 5> errors;
};
const std::map<double, std::array<Example2ReferenceRow, 3>> kExample2Reference = {
    {0.5,
     {{{{0, 1, 3}, {1.2e-2, 3.4e-4, 6.7e-5, 2.3e-5, 1.1e-5}},
       {{0, 2, 4}, {7.3e-4, 8.9e-6, 1.1e-6, 3.0e-7, 1.1e-7}},
       {{1, 2, 5}, {1.3e-6, 1.1e-8, 8.0e-10, 1.4e-10, 3.8e-11}}}}},
    {0.9,
     {{{{0, 1, 3}, {1.5e-2, 4.3e-4, 8.7e-5, 3.0e-5, 1.4e-5}},
       {{0, 2, 4}, {1.3e-3, 1.5e-5, 2.0e-6, 5.1e-7, 1.9e-7}},
       {{1, 2, 5}, {1.7e-6, 1.7e-8, 1.5e-9, 2.9e-10, 8.0e-11}}}}}};

using Cx = std::complex<double>;

// Paper Table 1 (2 printed digits).
const std::map<std::pair<int, int>, std::vector<Cx>> kTable1Mstar = {
    {{0, 1}, {{5.5, 0.0}, {3.6, 2.8}, {3.6, -2.8}}},
    {{0, 2}, {{5.7, 1.1}, {5.7, -1.1}, {3.3, 4.9}, {3.3, -4.9}}},
    {{1, 2}, {{3.7, 7.0}, {3.7, -7.0}, {7.8, 0.0}, {6.3, 2.9}, {6.3, -2.9}}}};
const std::map<std::pair<int, int>, std::vector<Cx>> kTable1M12 = {
    {{0, 1}, {{19, 2.1}, {19, -2.1}, {18, 5.9}, {18, -5.9}, {11, 12}, {11, -12},
              {12, 11}, {12, -11}, {16, 8.7}, {16, -8.7}, {13, 11}, {13, -11}}},
    {{0, 2}, {{5.7, 14}, {5.7, -14}, {7.6, 14}, {7.6, -14}, {10, 12}, {10, -12},
              {12, 8.4}, {12, -8.4}, {13, 4.4}, {13, -4.4}, {13, 1.0}, {13, -1.0}}},
    {{1, 2}, {{8.2, 17}, {8.2, -17}, {10, 15}, {10, -15}, {13, 13}, {13, -13},
              {15, 8.7}, {15, -8.7}, {15, 5.1}, {15, -5.1}, {16, 1.8}, {16, -1.8}}}};

// Paper Table 2: |R_m(inf)| rows (m*, 12, 24, 48).
const std::map<std::pair<int, int>, std::array<double, 4>> kTable2 = {
    {{0, 1}, {5.9e-1, 4.5e-3, 6.9e-6, 1.6e-11}},
    {{0, 2}, {4.3e-2, 4.4e-4, 1.4e-8, 1.5e-17}},
    {{1, 2}, {7.4e-1, 7.6e-2, 1.5e-3, 6.3e-7}}};

// Paper Table 3: minimum certified block sizes.
const std::vector<std::pair<std::pair<int, int>, int>> kTable3 = {
    {{0, 1}, 3}, {{0, 2}, 4}, {{1, 2}, 5}, {{1, 3}, 6},
    {{2, 3}, 7}, {{2, 4}, 10}, {{3, 4}, 13}, {{3, 5}, 13}};

/// Greedy 2-digit matching of a computed spectrum against printed values.
bool spectrum_matches_printed(const std::vector<Cx>& computed, std::vector<Cx> printed) {
    if (computed.size() != printed.size()) return false;
    for (const Cx& c : computed) {
        bool found = false;
        for (std::size_t k = 0; k < printed.size(); ++k) {
            if (match_2sig(c.real(), printed[k].real()) &&
                match_2sig(c.imag(), printed[k].imag())) {
                printed.erase(printed.begin() + k);
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

/// Composite-Simpson value with one Richardson extrapolation; the second,
/// algorithmically independent reference strategy of Example 4.
double simpson_richardson(const std::function<double(double)>& f, double a, double b, double tol) {
    auto simpson = [&](int n) {
        const double h = (b - a) / n;
        double s = f(a) + f(b);
        for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
        return s * h / 3.0;
    };
    double prev = simpson(64);
    for (int n = 128; n <= (1 << 22); n *= 2) {
        const double cur = simpson(n);
        const double rich = cur + (cur - prev) / 15.0;
        if (std::abs(cur - prev) < 15.0 * tol) return rich;
        prev = cur;
    }
    throw OracleError("simpson_richardson: did not reach tolerance");
}

}  // namespace

double estimate_order(double err1, int N1, double err2, int N2) {
    if (err1 <= 0.0 || err2 <= 0.0 || N1 == N2) return kNaN;
    return std::abs(std::log(err1) - std::log(err2)) /
           std::abs(std::log(static_cast<double>(N1)) - std::log(static_cast<double>(N2)));
}

std::function<double(double)> make_test_function(const std::string& desc) {
    if (desc == "example1") return g_example1;
    if (desc == "example2") return g_example2;
    if (desc == "example3") return g_example3;
    if (desc == "example4") return g_example4;
    if (desc == "one") return [](double) { return 1.0; };
    if (desc == "t") return [](double t) { return t; };
    if (desc == "sin") return [](double t) { return std::sin(t); };
    if (desc.rfind("poly:", 0) == 0) {
        std::vector<double> coeffs;
        std::stringstream ss(desc.substr(5));
        std::string item;
        while (std::getline(ss, item, ',')) coeffs.push_back(std::stod(item));
        if (coeffs.empty()) throw ArgumentError("make_test_function: empty poly coefficients");
        return [coeffs](double t) {
            double acc = 0.0;
            for (std::size_t d = coeffs.size(); d-- > 0;) acc = acc * t + coeffs[d];
            return acc;
        };
    }
    throw ArgumentError("make_test_function: unknown function '" + desc + "'");
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArgumentError("config file not found: " + path);
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ArgumentError("config: malformed line '" + line + "'");
        const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "id") cfg.id = val;
        else if (key == "kernel") cfg.kernel = val;
        else if (key == "T") cfg.T = std::stod(val);
        else if (key == "out") cfg.out_dir = val;
        else if (key == "tol") cfg.tol = std::stod(val);
        else if (key == "threads") cfg.threads = std::stoi(val);
        else if (key == "N") {
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ',')) cfg.Ns.push_back(std::stoi(item));
        } else if (key == "schemes") {
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ';')) {
                int k1, k2, m;
                char c1, c2;
                std::stringstream ps(item);
                if (!(ps >> k1 >> c1 >> k2 >> c2 >> m))
                    throw ArgumentError("config: bad scheme triple '" + item + "'");
                cfg.schemes.push_back({k1, k2, m});
            }
        } else {
            throw ArgumentError("config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    for (std::size_t i = 1; i < Ns.size(); ++i)
        if (Ns[i] <= Ns[i - 1]) throw ArgumentError("config: N sweep must be strictly increasing");
    for (const auto& s : schemes) s.validate();
    if (!(tol > 0.0) || tol >= 1.0) throw ArgumentError("config: tol must lie in (0,1)");
}

std::vector<ConvergenceReport> run_example1(const ExperimentConfig& cfg) {
    const SchemeParams scheme = cfg.schemes.empty() ? SchemeParams{0, 1, 3} : cfg.schemes[0];
    const double T = cfg.T > 0.0 ? cfg.T : 2.0;
    const std::vector<int> Ns = cfg.Ns.empty() ? std::vector<int>{8, 16, 32, 64, 128, 256} : cfg.Ns;
    const int Nref = 1024;
    for (int N : Ns)
        if (Nref % N != 0 || N >= Nref)
            throw ArgumentError("run_example1: every N must divide the reference N=1024");

    std::vector<double> mus = {-0.2, -0.8, -1.8, 0.0, 0.8, 1.8};
    if (!cfg.kernel.empty()) {
        const Kernel k = make_kernel(cfg.kernel);
        if (k.name.rfind("periodic_sum", 0) != 0)
            throw ArgumentError("run_example1: kernel must be a periodic_sum descriptor");
        mus = {k.mu};
    }
    const BlockTableau tab = assemble_tableau(scheme);
    const auto rep = certify_assumption(tab);
    if (!rep.assumption_satisfied)
        throw ArgumentError("run_example1: scheme fails Assumption-1 certification");

    ContourOptions opt;
    opt.tol = cfg.tol;
    opt.threads = cfg.threads;
    opt.assume_certified = true;  // certified just above

    std::vector<ConvergenceReport> reports;
    for (double mu : mus) {
        const Kernel kernel = periodic_sum_kernel(mu);
        const Grid gref = Grid::make(T, Nref, scheme.m);
        const WeightTable wref = compute_weights(tab, kernel, gref.h, Nref, opt);
        const Eigen::MatrixXd Uref = forward_apply(wref, sample_function(gref, g_example1));

        ConvergenceReport report;
        std::ostringstream label;
        label << "example1 mu=" << mu;
        report.label = label.str();
        for (std::size_t k = 0; k < Ns.size(); ++k) {
            const int N = Ns[k];
            const Grid grid = Grid::make(T, N, scheme.m);
            const WeightTable wt = compute_weights(tab, kernel, grid.h, N, opt);
            const Eigen::MatrixXd U = forward_apply(wt, sample_function(grid, g_example1));
            ConvergenceRow row;
            row.N = N;
            row.max_block_error = last_block_error_vs_reference(U, Uref, N, Nref, scheme.m);
            row.estimated_order =
                k == 0 ? kNaN
                       : estimate_order(report.rows.back().max_block_error, report.rows.back().N,
                                        row.max_block_error, N);
            report.rows.push_back(row);
        }
        reports.push_back(std::move(report));

        std::ostringstream name;
        name << "example1_mu" << mu << ".csv";
        auto os = open_csv(cfg, name.str());
        os << "N,err,order,ref_err,pass\n";
        const auto ref = kExample1Reference.find(mu);
        for (std::size_t k = 0; k < Ns.size(); ++k) {
            const auto& row = reports.back().rows[k];
            double ref_err = kNaN;
            if (ref != kExample1Reference.end() && Ns[k] == (8 << k) && k < 6)
                ref_err = ref->second[k];
            os << row.N << "," << row.max_block_error << "," << row.estimated_order << ","
               << ref_err << ","
               << (std::isnan(ref_err) ? "n/a"
                                         : (factor_match(row.max_block_error, ref_err, 5.0)
                                                ? "pass"
                                                : "FAIL"))
               << "\n";
        }
    }
    return reports;
}

std::vector<ConvergenceReport> run_example2(const ExperimentConfig& cfg) {
    const double T = cfg.T > 0.0 ? cfg.T : 5.0;
    const std::vector<int> Ns = cfg.Ns.empty() ? std::vector<int>{8, 24, 40, 56, 72} : cfg.Ns;
    const std::vector<SchemeParams> schemes =
        cfg.schemes.empty() ? std::vector<SchemeParams>{{0, 1, 3}, {0, 2, 4}, {1, 2, 5}}
                            : cfg.schemes;
    std::vector<double> alphas = {0.5, 0.9};
    if (!cfg.kernel.empty()) {
        const Kernel k = make_kernel(cfg.kernel);
        alphas = {-k.mu};  // fractional descriptor carries alpha = -mu
    }

    ContourOptions opt;
    opt.tol = cfg.tol;
    opt.threads = cfg.threads;

    std::vector<ConvergenceReport> reports;
    for (double alpha : alphas) {
        const Kernel kernel = fractional_kernel(alpha);
        const double lg = std::lgamma(alpha);
        const auto exact_at = [&](double t) {
            return oracle_direct_convolution(
                [&](double s) { return std::exp(std::log(s) * (alpha - 1.0) - lg); }, g_example2,
                t, 1e-12, alpha - 1.0);
        };
        const auto ref_rows = kExample2Reference.find(alpha);
        for (const auto& scheme : schemes) {
            const BlockTableau tab = assemble_tableau(scheme);
            ConvergenceReport report;
            std::ostringstream label;
            label << "example2 alpha=" << alpha << " scheme=(" << scheme.k1 << "," << scheme.k2
                  << "," << scheme.m << ")";
            report.label = label.str();
            for (std::size_t k = 0; k < Ns.size(); ++k) {
                const int N = Ns[k];
                const Grid grid = Grid::make(T, N, scheme.m);
                const WeightTable wt = compute_weights(tab, kernel, grid.h, N, opt);
                const SampleVector samples = sample_function(grid, g_example2);
                const Eigen::MatrixXd U = corrected_apply(wt, kernel, grid, samples);
                double worst = 0.0;
                for (int i = 1; i <= scheme.m; ++i)
                    worst = std::max(worst,
                                     std::abs(U(N - 1, i - 1) - exact_at(grid.fine(N - 1, i))));
                ConvergenceRow row;
                row.N = N;
                row.max_block_error = worst;
                row.estimated_order =
                    k == 0 ? kNaN
                           : estimate_order(report.rows.back().max_block_error,
                                            report.rows.back().N, worst, N);
                report.rows.push_back(row);

                // pointwise plain-vs-corrected dump near t = 0 (first blocks)
                if (scheme.k1 == 1 && scheme.k2 == 2 && k + 1 == Ns.size()) {
                    const Eigen::MatrixXd Uplain = forward_apply(wt, samples);
                    std::ostringstream name;
                    name << "example2_pointwise_alpha" << alpha << "_N" << N << ".csv";
                    auto os = open_csv(cfg, name.str());
                    os << "t,err_plain,err_corrected\n";
                    for (int n = 0; n < std::min(N, 8); ++n)
                        for (int i = 1; i <= scheme.m; ++i) {
                            const double t = grid.fine(n, i);
                            const double ex = exact_at(t);
                            os << t << "," << std::abs(Uplain(n, i - 1) - ex) << ","
                               << std::abs(U(n, i - 1) - ex) << "\n";
                        }
                }
            }
            reports.push_back(report);

            std::ostringstream name;
            name << "example2_alpha" << alpha << "_scheme" << scheme.k1 << scheme.k2 << scheme.m
                 << ".csv";
            auto os = open_csv(cfg, name.str());
            os << "N,err,order,ref_err,pass\n";
            const Example2ReferenceRow* ref = nullptr;
            if (ref_rows != kExample2Reference.end())
                for (const auto& pr : ref_rows->second)
                    if (pr.scheme.k1 == scheme.k1 && pr.scheme.k2 == scheme.k2 &&
                        pr.scheme.m == scheme.m)
                        ref = &pr;
            for (std::size_t k = 0; k < report.rows.size(); ++k) {
                const auto& row = report.rows[k];
                const double ref_err =
                    (ref && k < 5 && Ns[k] == std::array<int, 5>{8, 24, 40, 56, 72}[k])
                        ? ref->errors[k]
                        : kNaN;
                os << row.N << "," << row.max_block_error << "," << row.estimated_order << ","
                   << ref_err << ","
                   << (std::isnan(ref_err)
                           ? "n/a"
                           : (factor_match(row.max_block_error, ref_err, 5.0) ? "pass" : "FAIL"))
                   << "\n";
            }
        }
    }
    return reports;
}

Example3Result run_example3(const ExperimentConfig& cfg) {
    const double T = cfg.T > 0.0 ? cfg.T : 4.0;
    const int total_nodes = 120;
    const Kernel kernel = difference_kernel();
    const auto u_exact = [](double t) {
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) acc += g_example3(t - j);
        return acc;
    };

    ContourOptions opt;
    opt.tol = cfg.tol;
    opt.threads = cfg.threads;

    Example3Result result;
    auto sol_csv = [&](const std::string& method) {
        auto os = open_csv(cfg, "example3_" + method + ".csv");
        os << "t,u_exact,u_" << method << "\n";
        return os;
    };

    const std::vector<SchemeParams> schemes =
        cfg.schemes.empty()
            ? std::vector<SchemeParams>{{0, 1, 3}, {0, 2, 4}, {1, 2, 5}, {1, 1, 4}}
            : cfg.schemes;
    for (const auto& scheme : schemes) {
        std::ostringstream mname;
        mname << "bgacq_" << scheme.k1 << scheme.k2 << "_" << scheme.m;
        MethodError me;
        me.method = mname.str();
        if (total_nodes % scheme.m != 0) {
            me.skipped = true;
            me.note = "block size does not divide 120 nodes";
            result.methods.push_back(me);
            continue;
        }
        const int N = total_nodes / scheme.m;
        const BlockTableau tab = assemble_tableau(scheme);
        const auto rep = certify_assumption(tab);
        ContourOptions local = opt;
        local.assume_certified = true;
        if (!rep.assumption_satisfied) {
            me.skipped = true;
            me.note = "fails Assumption-1 certification (runtime check)";
            result.methods.push_back(me);
            continue;
        }
        const Grid grid = Grid::make(T, N, scheme.m);
        const WeightTable wt = compute_weights(tab, kernel, grid.h, N, local);
        const Eigen::MatrixXd U =
            solve_convolution_equation(wt, sample_function(grid, g_example3));
        auto os = sol_csv(me.method);
        for (int n = 0; n < N; ++n)
            for (int i = 1; i <= scheme.m; ++i) {
                const double t = grid.fine(n, i);
                os << t << "," << u_exact(t) << "," << U(n, i - 1) << "\n";
                me.max_error = std::max(me.max_error, std::abs(U(n, i - 1) - u_exact(t)));
            }
        result.methods.push_back(me);
    }

    for (const auto method : {LmMethod::BDF2, LmMethod::TR}) {
        MethodError me;
        me.method = method == LmMethod::BDF2 ? "bdf2" : "tr";
        const int N = total_nodes;
        const double h = T / N;
        const auto w = baseline_lmcq_weights(method, kernel, h, N, opt);
        std::vector<double> rhs(N + 1);
        for (int n = 0; n <= N; ++n) rhs[n] = g_example3(n * h);
        const auto u = scalar_solve(w, rhs);
        auto os = sol_csv(me.method);
        for (int n = 0; n <= N; ++n) {
            const double t = n * h;
            os << t << "," << u_exact(t) << "," << u[n] << "\n";
            me.max_error = std::max(me.max_error, std::abs(u[n] - u_exact(t)));
        }
        result.methods.push_back(me);
    }

    for (const char* rk : {"grkcq_4", "lrkcq_4"}) {
        MethodError me;
        me.method = rk;
        me.skipped = true;
        me.note = "not implemented";
        result.methods.push_back(me);
    }

    auto os = open_csv(cfg, "example3_summary.csv");
    os << "method,max_error,note\n";
    for (const auto& me : result.methods)
        os << me.method << "," << (me.skipped ? kNaN : me.max_error) << ","
           << (me.note.empty() ? "ok" : me.note) << "\n";
    return result;
}

Example4Result run_example4(const ExperimentConfig& cfg) {
    const double T = cfg.T > 0.0 ? cfg.T : 2.0;
    Example4Result result;
    result.omega = 10.0;
    if (!cfg.kernel.empty()) {
        const Kernel probe = make_kernel(cfg.kernel);
        if (probe.name.rfind("bessel", 0) != 0)
            throw ArgumentError("run_example4: kernel must be a bessel descriptor");
        result.omega = std::stod(probe.name.substr(probe.name.find('=') + 1));
    }

    const auto reference_for = [&](double om) {
        return oracle_direct_convolution(
            [om](double s) { return std::cyl_bessel_j(0.0, om * s); }, g_example4, T, 1e-12);
    };
    result.reference = reference_for(result.omega);
    result.reference_crosscheck = simpson_richardson(
        [&](double s) { return std::cyl_bessel_j(0.0, result.omega * s) * g_example4(T - s); },
        0.0, T, 1e-11);
    if (std::abs(result.reference - result.reference_crosscheck) > 1e-10)
        throw OracleError("run_example4: the two reference strategies disagree");

    ContourOptions opt;
    opt.tol = cfg.tol;
    opt.threads = cfg.threads;

    const SchemeParams dissipative{0, 2, 4};
    const SchemeParams conservative{1, 1, 4};
    const BlockTableau tab_d = assemble_tableau(dissipative);
    const BlockTableau tab_c = assemble_tableau(conservative);
    const bool cons_certified = certify_assumption(tab_c).assumption_satisfied;
    result.comparison_note = cons_certified
                                 ? "bgacq_11_4 certified"
                                 : "bgacq_11_4 fails certification; weights asserted";

    const Kernel kernel = bessel_kernel(result.omega);
    const auto last_value = [&](const BlockTableau& tab, int N, const Kernel& k) {
        ContourOptions local = opt;
        local.assume_certified = true;
        const Grid grid = Grid::make(T, N, tab.params.m);
        const WeightTable wt = compute_weights(tab, k, grid.h, N, local);
        const Eigen::MatrixXd U = forward_apply(wt, sample_function(grid, g_example4));
        return U(N - 1, tab.params.m - 1);
    };

    for (int N : {8, 16, 32, 64, 128}) {
        const double vd = last_value(tab_d, N, kernel);
        const double vc = last_value(tab_c, N, kernel);
        result.error_vs_nodes.emplace_back(N * 4,
                                           std::abs(vd - result.reference) /
                                               std::abs(result.reference));
        result.comparison_error_vs_nodes.emplace_back(
            N * 4, std::abs(vc - result.reference) / std::abs(result.reference));
    }
    {
        auto os = open_csv(cfg, "example4_error_vs_nodes.csv");
        os << "nodes,relerr_bgacq_02_4,relerr_bgacq_11_4\n";
        for (std::size_t i = 0; i < result.error_vs_nodes.size(); ++i)
            os << result.error_vs_nodes[i].first << "," << result.error_vs_nodes[i].second << ","
               << result.comparison_error_vs_nodes[i].second << "\n";
    }
    {
        auto os = open_csv(cfg, "example4_error_vs_omega.csv");
        os << "omega,relerr_bgacq_02_4,relerr_bgacq_11_4\n";
        for (double om : {5.0, 10.0, 20.0, 40.0}) {
            const double ref = reference_for(om);
            const Kernel k = bessel_kernel(om);
            const double vd = last_value(tab_d, 32, k);
            const double vc = last_value(tab_c, 32, k);
            result.error_vs_omega.emplace_back(om, std::abs(vd - ref) / std::abs(ref));
            os << om << "," << std::abs(vd - ref) / std::abs(ref) << ","
               << std::abs(vc - ref) / std::abs(ref) << "\n";
        }
    }
    return result;
}

void run_stability_tables(const ExperimentConfig& cfg) {
    const bool all = cfg.id == "stability" || cfg.id == "custom";
    if (all || cfg.id == "table1") {
        auto os = open_csv(cfg, "table1.csv");
        os << "k1,k2,m,computed_spectrum,matches_ref_2digits\n";
        for (const auto& [pair, printed] : kTable1Mstar) {
            for (int which = 0; which < 2; ++which) {
                const int m = which == 0 ? pair.first + pair.second + 2 : 12;
                const auto& ref = which == 0 ? printed : kTable1M12.at(pair);
                const auto spec = generator_spectrum(assemble_tableau({pair.first, pair.second, m}));
                os << pair.first << "," << pair.second << "," << m << ",\"";
                for (std::size_t i = 0; i < spec.size(); ++i)
                    os << (i ? ";" : "") << spec[i].real() << (spec[i].imag() < 0 ? "-" : "+")
                       << std::abs(spec[i].imag()) << "i";
                os << "\"," << (spectrum_matches_printed(spec, ref) ? "pass" : "FAIL") << "\n";
            }
            // Fig. 1 boundary traces
            for (const int m : {pair.first + pair.second + 2, 12}) {
                const auto trace = stability_boundary(
                    assemble_tableau({pair.first, pair.second, m}), 256);
                std::ostringstream name;
                name << "fig1_boundary_" << pair.first << pair.second << "_m" << m << ".csv";
                auto bos = open_csv(cfg, name.str());
                write_points_csv(trace.points, bos);
            }
        }
    }
    if (all || cfg.id == "table2") {
        auto os = open_csv(cfg, "table2.csv");
        os << "k1,k2,m,computed,ref,matches_2digits\n";
        for (const auto& [pair, row] : kTable2) {
            const std::array<int, 4> ms = {pair.first + pair.second + 2, 12, 24, 48};
            for (int c = 0; c < 4; ++c) {
                const double r = stability_at_infinity(
                    assemble_tableau({pair.first, pair.second, ms[c]}));
                os << pair.first << "," << pair.second << "," << ms[c] << "," << r << "," << row[c]
                   << "," << (match_2sig(r, row[c]) ? "pass" : "FAIL") << "\n";
            }
        }
    }
    if (all || cfg.id == "table3") {
        auto os = open_csv(cfg, "table3.csv");
        os << "k1,k2,computed_mstar,ref_mstar,match\n";
        for (const auto& [pair, ref_m] : kTable3) {
            const auto m = min_block_size(pair.first, pair.second, 20);
            os << pair.first << "," << pair.second << ","
               << (m ? std::to_string(*m) : std::string("not-found")) << "," << ref_m << ","
               << (m && *m == ref_m ? "pass" : "FAIL") << "\n";
        }
    }
}

void run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.id == "example1") {
        run_example1(cfg);
    } else if (cfg.id == "example2") {
        run_example2(cfg);
    } else if (cfg.id == "example3") {
        run_example3(cfg);
    } else if (cfg.id == "example4") {
        run_example4(cfg);
    } else if (cfg.id == "table1" || cfg.id == "table2" || cfg.id == "table3" ||
               cfg.id == "stability") {
        run_stability_tables(cfg);
    } else if (cfg.id == "custom") {
        // self-referential convergence study for an arbitrary registry kernel
        const SchemeParams scheme = cfg.schemes.empty() ? SchemeParams{0, 1, 3} : cfg.schemes[0];
        const double T = cfg.T > 0.0 ? cfg.T : 2.0;
        std::vector<int> Ns = cfg.Ns.empty() ? std::vector<int>{8, 16, 32, 64} : cfg.Ns;
        const Kernel kernel = make_kernel(cfg.kernel.empty() ? "integration" : cfg.kernel);
        const int Nref = 4 * Ns.back();
        const BlockTableau tab = assemble_tableau(scheme);
        ContourOptions opt;
        opt.tol = cfg.tol;
        opt.threads = cfg.threads;
        const Grid gref = Grid::make(T, Nref, scheme.m);
        const WeightTable wref = compute_weights(tab, kernel, gref.h, Nref, opt);
        const Eigen::MatrixXd Uref = forward_apply(wref, sample_function(gref, g_example1));
        auto os = open_csv(cfg, "custom_convergence.csv");
        os << "N,err,order\n";
        double prev_err = 0.0;
        int prev_n = 0;
        for (int N : Ns) {
            if (Nref % N != 0) throw ArgumentError("custom: every N must divide 4*max(N)");
            const Grid grid = Grid::make(T, N, scheme.m);
            const WeightTable wt = compute_weights(tab, kernel, grid.h, N, opt);
            const Eigen::MatrixXd U = forward_apply(wt, sample_function(grid, g_example1));
            const double err = last_block_error_vs_reference(U, Uref, N, Nref, scheme.m);
            os << N << "," << err << ","
               << (prev_n ? estimate_order(prev_err, prev_n, err, N) : kNaN) << "\n";
            prev_err = err;
            prev_n = N;
        }
    } else {
        throw ArgumentError("run_experiment: unknown id '" + cfg.id + "'");
    }
}

}  // namespace bgacq
