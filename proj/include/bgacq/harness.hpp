#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bgacq/quadrature.hpp"
#include "bgacq/stability.hpp"

namespace bgacq {

/// Configuration of a reproduction run. Empty/zero fields fall back to the
/// experiment's published defaults.
struct ExperimentConfig {
    std::string id = "custom";  // table1|table2|table3|example1..example4|custom
    std::vector<SchemeParams> schemes;
    std::string kernel;  // registry descriptor
    double T = 0.0;
    std::vector<int> Ns;
    std::string out_dir = ".";
    double tol = 1e-16;
    int threads = 0;

    /// key=value file, one experiment per file.
    static ExperimentConfig from_file(const std::string& path);
    void validate() const;
};

struct ConvergenceRow {
    int N = 0;
    double max_block_error = 0.0;
    double estimated_order = 0.0;  // NaN on the first row of a sweep
};

/// Last-block (n = N-1) max errors and orders across an N sweep.
struct ConvergenceReport {
    std::string label;
    std::vector<ConvergenceRow> rows;
};

/// |log e1 - log e2| / |log N1 - log N2|.
double estimate_order(double err1, int N1, double err2, int N2);

/// Named sample functions for the CLI ("example1".."example4", "one", "t",
/// "sin", "poly:c0,c1,...").
std::function<double(double)> make_test_function(const std::string& desc);

std::vector<ConvergenceReport> run_example1(const ExperimentConfig& cfg);
std::vector<ConvergenceReport> run_example2(const ExperimentConfig& cfg);

struct MethodError {
    std::string method;
    double max_error = 0.0;
    bool skipped = false;
    std::string note;
};
struct Example3Result {
    std::vector<MethodError> methods;
};
Example3Result run_example3(const ExperimentConfig& cfg);

struct Example4Result {
    double omega = 0.0;
    double reference = 0.0;
    double reference_crosscheck = 0.0;
    std::vector<std::pair<int, double>> error_vs_nodes;             // dissipative scheme
    std::vector<std::pair<int, double>> comparison_error_vs_nodes;  // conservative-leaning
    std::vector<std::pair<double, double>> error_vs_omega;
    std::string comparison_note;
};
Example4Result run_example4(const ExperimentConfig& cfg);

/// Regenerates Tables 1-3 (computed and reference values side by side with a
/// pass column) and the Fig.-1 boundary traces.
void run_stability_tables(const ExperimentConfig& cfg);

/// Dispatch on cfg.id.
void run_experiment(const ExperimentConfig& cfg);

}  // namespace bgacq
