#include <CLI11.hpp>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bgacq/errors.hpp"
#include "bgacq/harness.hpp"
#include "bgacq/kernels.hpp"
#include "bgacq/quadrature.hpp"
#include "bgacq/stability.hpp"

namespace {

using namespace bgacq;

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream os(std::filesystem::path(dir) / name);
    if (!os) throw ArgumentError("cannot open " + name + " under " + dir);
    os.precision(17);
    return os;
}

struct CommonArgs {
    int k1 = 0, k2 = 1, m = 3;
    std::string kernel = "integration";
    double T = 1.0;
    int N = 16;
    double tol = 1e-16;
    std::string out = "out";
    std::string format = "csv";
    std::string g = "example1";
};

void add_scheme_flags(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--k1", a.k1, "left interpolation width");
    cmd->add_option("--k2", a.k2, "right interpolation width");
    cmd->add_option("--m", a.m, "block size");
}

void add_run_flags(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--kernel", a.kernel, "kernel descriptor, e.g. fractional:alpha=0.5");
    cmd->add_option("--T", a.T, "final time");
    cmd->add_option("--N", a.N, "number of coarse blocks");
    cmd->add_option("--tol", a.tol, "contour tolerance");
    cmd->add_option("--g", a.g, "sample function (example1..4, one, t, sin, poly:c0,c1,...)");
}

int dispatch(CLI::App& app, CommonArgs& a, const std::string& config_path) {
    if (app.got_subcommand("tableau")) {
        const BlockTableau tab = assemble_tableau({a.k1, a.k2, a.m});
        auto os = open_out(a.out, "tableau.csv");
        dump_tableau(tab, os);
        std::cout << "wrote tableau.csv to " << a.out << "\n";
        return 0;
    }
    if (app.got_subcommand("stability")) {
        const BlockTableau tab = assemble_tableau({a.k1, a.k2, a.m});
        const StabilityReport rep = certify_assumption(tab);
        {
            auto os = open_out(a.out, "stability_report.txt");
            write_report(rep, os);
        }
        {
            auto os = open_out(a.out, "spectrum.csv");
            write_points_csv(rep.generator_spectrum, os);
        }
        {
            const BoundaryTrace trace = stability_boundary(tab, 256);
            auto os = open_out(a.out, "boundary.csv");
            write_points_csv(trace.points, os);
            if (trace.rays_failed > 0)
                std::cerr << "warning: " << trace.rays_failed << " boundary rays failed\n";
        }
        std::cout << (rep.assumption_satisfied ? "assumption satisfied" : "assumption FAILED")
                  << "; report written to " << a.out << "\n";
        return rep.assumption_satisfied ? 0 : 1;
    }
    if (app.got_subcommand("weights")) {
        const BlockTableau tab = assemble_tableau({a.k1, a.k2, a.m});
        const Kernel kernel = make_kernel(a.kernel);
        const WeightTable wt = compute_weights(tab, kernel, a.T / a.N, a.N, a.tol);
        {
            auto os = open_out(a.out, "weights.csv");
            write_weight_table(wt, os);
        }
        {
            auto os = open_out(a.out, "eig_conditions.csv");
            os << "contour_index,eig_condition\n";
            for (std::size_t i = 0; i < wt.eig_conditions.size(); ++i)
                os << i << "," << wt.eig_conditions[i] << "\n";
        }
        std::cout << "wrote weights.csv (rho=" << wt.contour_rho
                  << ", L=" << wt.contour_points << ", imag leak=" << wt.max_imag_leak
                  << ") to " << a.out << "\n";
        return 0;
    }
    if (app.got_subcommand("apply") || app.got_subcommand("solve")) {
        const bool applying = app.got_subcommand("apply");
        const BlockTableau tab = assemble_tableau({a.k1, a.k2, a.m});
        const Kernel kernel = make_kernel(a.kernel);
        const Grid grid = Grid::make(a.T, a.N, a.m);
        const WeightTable wt = compute_weights(tab, kernel, grid.h, a.N, a.tol);
        const SampleVector samples = sample_function(grid, make_test_function(a.g));
        Eigen::MatrixXd U;
        std::string name;
        if (applying) {
            const bool corrected =
                app.get_subcommand("apply")->get_option("--corrected")->as<bool>();
            U = corrected ? corrected_apply(wt, kernel, grid, samples)
                          : forward_apply(wt, samples);
            name = "apply.csv";
        } else {
            U = solve_convolution_equation(wt, samples);
            name = "solve.csv";
        }
        auto os = open_out(a.out, name);
        os << "t,value\n";
        for (int n = 0; n < grid.N; ++n)
            for (int i = 1; i <= grid.m; ++i)
                os << grid.fine(n, i) << "," << U(n, i - 1) << "\n";
        std::cout << "wrote " << name << " to " << a.out << "\n";
        return 0;
    }
    if (app.got_subcommand("experiment")) {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = ExperimentConfig::from_file(config_path);
        const auto* sub = app.get_subcommand("experiment");
        const auto ids = sub->remaining();
        if (!ids.empty()) cfg.id = ids.front();
        if (sub->count("--out") || cfg.out_dir.empty() || cfg.out_dir == ".")
            cfg.out_dir = a.out;
        if (sub->count("--T")) cfg.T = a.T;
        if (sub->count("--kernel")) cfg.kernel = a.kernel;
        if (sub->count("--tol")) cfg.tol = a.tol;
        run_experiment(cfg);
        std::cout << "experiment " << cfg.id << " written to " << cfg.out_dir << "\n";
        return 0;
    }
    std::cout << app.help();
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"block generalized Adams convolution quadrature toolkit"};
    app.require_subcommand(0, 1);
    CommonArgs a;
    std::string config_path;

    auto* tableau = app.add_subcommand("tableau", "dump the BGA tableau");
    add_scheme_flags(tableau, a);
    tableau->add_option("--out", a.out, "output directory");

    auto* stability = app.add_subcommand("stability", "certify a scheme, dump report and traces");
    add_scheme_flags(stability, a);
    stability->add_option("--out", a.out, "output directory");

    auto* weights = app.add_subcommand("weights", "compute CQ weights and diagnostics");
    add_scheme_flags(weights, a);
    add_run_flags(weights, a);
    weights->add_option("--out", a.out, "output directory");

    auto* apply = app.add_subcommand("apply", "forward convolution quadrature of g");
    add_scheme_flags(apply, a);
    add_run_flags(apply, a);
    apply->add_flag("--corrected", "use the modified (corrected) quadrature");
    apply->add_option("--out", a.out, "output directory");

    auto* solve = app.add_subcommand("solve", "solve the convolution equation with rhs g");
    add_scheme_flags(solve, a);
    add_run_flags(solve, a);
    solve->add_option("--out", a.out, "output directory");

    auto* experiment = app.add_subcommand(
        "experiment", "run a reproduction: table1|table2|table3|example1..4|custom");
    experiment->allow_extras();
    add_run_flags(experiment, a);
    experiment->add_option("--config", config_path, "key=value experiment file");
    experiment->add_option("--out", a.out, "output directory");
    experiment->add_option("--format", a.format, "output format (csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return dispatch(app, a, config_path);
    } catch (const ArgumentError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    }
}
