#include "bgacq/oracle.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "bgacq/errors.hpp"

namespace bgacq {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1,1] with the embedded 7-point
// Gauss rule (even-index Kronrod nodes).
constexpr std::array<double, 15> kNodes = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
constexpr std::array<double, 15> kWeightsK = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
constexpr std::array<double, 7> kWeightsG = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), half = 0.5 * (b - a);
    double gk = 0.0, g7 = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double v = f(c + half * kNodes[i]);
        gk += kWeightsK[i] * v;
        if (i % 2 == 1) g7 += kWeightsG[i / 2] * v;
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = gk * half;
    p.error = std::abs((gk - g7) * half);
    return p;
}

}  // namespace

double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double tol) {
    if (!(tol > 0.0)) throw ArgumentError("adaptive_quadrature: tol must be positive");
    if (a == b) return 0.0;
    constexpr int kMaxPanels = 4000;
    std::priority_queue<Panel> panels;
    panels.push(evaluate_panel(f, a, b));
    double total_err = panels.top().error;
    double total_val = panels.top().value;
    int count = 1;
    while (total_err > tol && count < kMaxPanels) {
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            panels.push(worst);  // interval narrowed to machine width
            break;
        }
        const Panel left = evaluate_panel(f, worst.a, mid);
        const Panel right = evaluate_panel(f, mid, worst.b);
        total_val += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    if (total_err > tol && total_err > 64.0 * tol)
        throw OracleError("adaptive_quadrature: budget exhausted, error estimate " +
                          std::to_string(total_err) + " above tolerance " + std::to_string(tol));
    return total_val;
}

double oracle_direct_convolution(const std::function<double(double)>& time_kernel,
                                 const std::function<double(double)>& g, double t, double tol,
                                 double singularity_exponent) {
    if (!(t >= 0.0)) throw ArgumentError("oracle_direct_convolution: t must be nonnegative");
    if (t == 0.0) return 0.0;
    if (!(singularity_exponent > -1.0))
        throw ArgumentError("oracle_direct_convolution: endpoint exponent must exceed -1");
    if (singularity_exponent == 0.0) {
        return adaptive_quadrature([&](double s) { return time_kernel(s) * g(t - s); }, 0.0, t,
                                   tol);
    }
    // s = u^p flattens k(s) ~ s^beta into u^{p beta + p - 1} = u^0
    const double p = 1.0 / (1.0 + singularity_exponent);
    const double upper = std::pow(t, 1.0 / p);
    return adaptive_quadrature(
        [&](double u) {
            const double s = std::pow(u, p);
            return time_kernel(s) * g(t - s) * p * std::pow(u, p - 1.0);
        },
        0.0, upper, tol);
}

}  // namespace bgacq
