#pragma once

#include <complex>
#include <functional>
#include <string>

namespace bgacq {

/// A convolution kernel described through its Laplace transform K(lambda),
/// analytic and bounded as |K| <= M |lambda|^mu on Re(lambda) >= sigma.
/// `monomial_convolution`, when set, returns (K(d/dt) t^l)(t) exactly and
/// enables the corrected quadrature path.
struct Kernel {
    std::string name;
    std::function<std::complex<double>(std::complex<double>)> transfer;
    double sigma = 0.0;
    double mu = 0.0;
    std::function<double(int, double)> monomial_convolution;  // may be empty
    bool conjugate_symmetric = true;  // K(conj z) == conj(K(z))
    bool growth_check_ok = true;

    std::complex<double> operator()(std::complex<double> lambda) const { return transfer(lambda); }
    bool has_monomial_convolution() const { return static_cast<bool>(monomial_convolution); }
};

/// K(lambda) = lambda^{-alpha}, 0 < alpha <= 1 (Riemann-Liouville integral).
Kernel fractional_kernel(double alpha);

/// K_mu(lambda) = lambda^mu / (1 - e^{-lambda}); time-domain action is the
/// lattice sum of fractional derivatives/integrals of order mu.
Kernel periodic_sum_kernel(double mu);

/// K(lambda) = 1 - e^{-lambda}; time action u(t) - u(t-1).
Kernel difference_kernel();

/// K(lambda) = (omega^2 + lambda^2)^{-1/2}; time kernel J_0(omega t).
/// Branch cuts run leftward from +-i omega, positive on the real axis.
Kernel bessel_kernel(double omega);

/// K(lambda) = 1/(lambda + 1); time kernel e^{-t}, with exact monomial
/// convolutions.
Kernel exp_decay_kernel();

/// K(lambda) = 1/lambda (plain integration).
Kernel integration_kernel();

/// Wraps a user transfer with metadata; runs a sampled growth-bound spot
/// check and records the outcome (warning, not an error).
Kernel custom_kernel(std::string name,
                     std::function<std::complex<double>(std::complex<double>)> transfer,
                     double sigma, double mu,
                     std::function<double(int, double)> monomial_convolution = {});

/// Registry lookup used by the CLI: "fractional:alpha=0.5",
/// "periodic_sum:mu=-0.2", "difference", "bessel:omega=10", "integration",
/// "expdecay", "identity". Throws ArgumentError on unknown names/params.
Kernel make_kernel(const std::string& desc);

}  // namespace bgacq
