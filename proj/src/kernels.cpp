#include "bgacq/kernels.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include "bgacq/errors.hpp"

namespace bgacq {

namespace {

using Complex = std::complex<double>;

constexpr double kAxisSigma = 1e-8;  // kernels singular only on the imaginary axis

/// Gamma(l+1)/Gamma(l+1+s) with the 1/Gamma(nonpositive integer) = 0 convention.
double gamma_ratio(int l, double s) {
    const double arg = l + 1 + s;
    if (arg <= 0.0 && std::abs(arg - std::round(arg)) < 1e-12) return 0.0;
    if (arg > 0.0)
        return std::exp(std::lgamma(l + 1.0) - std::lgamma(arg));
    return std::tgamma(l + 1.0) / std::tgamma(arg);
}

bool spot_check_conjugate_symmetry(const Kernel& k) {
    for (int i = 0; i < 24; ++i) {
        const double r = std::pow(10.0, -1.0 + 4.0 * i / 23.0);
        const double t = 0.1 + 2.9 * ((i * 37) % 24) / 24.0;  // angles within (0, pi)
        const Complex lam = std::max(k.sigma, 0.0) + Complex(r * std::cos(t), r * std::sin(t));
        const Complex d = k.transfer(std::conj(lam)) - std::conj(k.transfer(lam));
        const double scale = std::abs(k.transfer(lam)) + 1e-300;
        if (!(std::abs(d) <= 1e-10 * scale)) return false;
    }
    return true;
}

bool spot_check_growth(const Kernel& k) {
    // |K(lambda)| / |lambda|^mu must stay bounded and not drift by decades.
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double r = std::pow(10.0, 6.0 * i / 199.0);
        const double theta = -1.4 + 2.8 * ((i * 29) % 200) / 200.0;
        Complex lam(r * std::cos(theta), r * std::sin(theta));
        if (lam.real() < k.sigma) lam = Complex(k.sigma + std::abs(lam.real()), lam.imag());
        const double ratio = std::abs(k.transfer(lam)) / std::pow(std::abs(lam), k.mu);
        if (!std::isfinite(ratio)) return false;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return hi / std::max(lo, 1e-300) < 1e3;
}

}  // namespace

Kernel fractional_kernel(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw ArgumentError("fractional_kernel: alpha must lie in (0, 1]");
    Kernel k;
    k.name = "fractional(alpha=" + std::to_string(alpha) + ")";
    k.transfer = [alpha](Complex lam) { return std::pow(lam, -alpha); };
    k.sigma = kAxisSigma;
    k.mu = -alpha;
    k.monomial_convolution = [alpha](int l, double t) {
        return t > 0.0 ? gamma_ratio(l, alpha) * std::pow(t, l + alpha) : 0.0;
    };
    return k;
}

Kernel periodic_sum_kernel(double mu) {
    Kernel k;
    k.name = "periodic_sum(mu=" + std::to_string(mu) + ")";
    k.transfer = [mu](Complex lam) {
        const Complex den = 1.0 - std::exp(-lam);
        if (std::abs(den) < 1e-300)
            throw KernelDomainError("periodic_sum_kernel: pole of 1/(1-e^{-lambda})", lam);
        return std::pow(lam, mu) / den;
    };
    k.sigma = kAxisSigma;
    k.mu = mu;
    if (mu < 0.0) {
        // lattice sum of fractional integrals of order -mu
        k.monomial_convolution = [mu](int l, double t) {
            double acc = 0.0;
            for (int j = 0; t - j > 0.0; ++j)
                acc += gamma_ratio(l, -mu) * std::pow(t - j, l - mu);
            return acc;
        };
    }
    return k;
}

Kernel difference_kernel() {
    Kernel k;
    k.name = "difference";
    k.transfer = [](Complex lam) { return 1.0 - std::exp(-lam); };
    k.sigma = -std::numeric_limits<double>::infinity();  // entire
    k.mu = 0.0;
    return k;
}

Kernel bessel_kernel(double omega) {
    if (!(omega > 0.0)) throw ArgumentError("bessel_kernel: omega must be positive");
    Kernel k;
    k.name = "bessel(omega=" + std::to_string(omega) + ")";
    k.transfer = [omega](Complex lam) {
        const Complex p = lam - Complex(0.0, omega);
        const Complex q = lam + Complex(0.0, omega);
        if (std::abs(p) < 1e-300 || std::abs(q) < 1e-300)
            throw KernelDomainError("bessel_kernel: branch point at +-i omega", lam);
        return 1.0 / (std::sqrt(p) * std::sqrt(q));
    };
    k.sigma = kAxisSigma;
    k.mu = -1.0;
    return k;
}

Kernel exp_decay_kernel() {
    Kernel k;
    k.name = "expdecay";
    k.transfer = [](Complex lam) { return 1.0 / (lam + 1.0); };
    k.sigma = -0.5;
    k.mu = -1.0;
    // int_0^t (t-s)^l e^{-s} ds = sum_{j=0}^{l} (-1)^j l!/(l-j)! t^{l-j} - (-1)^l l! e^{-t}
    k.monomial_convolution = [](int l, double t) {
        double acc = 0.0, fact = 1.0;  // l!/(l-j)!
        for (int j = 0; j <= l; ++j) {
            acc += (j % 2 ? -1.0 : 1.0) * fact * std::pow(t, l - j);
            fact *= (l - j);
        }
        double lfact = 1.0;
        for (int j = 2; j <= l; ++j) lfact *= j;
        return acc - (l % 2 ? -1.0 : 1.0) * lfact * std::exp(-t);
    };
    return k;
}

Kernel integration_kernel() {
    Kernel k;
    k.name = "integration";
    k.transfer = [](Complex lam) { return 1.0 / lam; };
    k.sigma = kAxisSigma;
    k.mu = -1.0;
    k.monomial_convolution = [](int l, double t) { return std::pow(t, l + 1) / (l + 1); };
    return k;
}

Kernel custom_kernel(std::string name,
                     std::function<Complex(Complex)> transfer, double sigma, double mu,
                     std::function<double(int, double)> monomial_convolution) {
    Kernel k;
    k.name = std::move(name);
    k.transfer = std::move(transfer);
    k.sigma = sigma;
    k.mu = mu;
    k.monomial_convolution = std::move(monomial_convolution);
    k.conjugate_symmetric = spot_check_conjugate_symmetry(k);
    k.growth_check_ok = spot_check_growth(k);
    if (!k.growth_check_ok)
        std::cerr << "warning: kernel '" << k.name << "' fails the |K| <= M |lambda|^"
                  << k.mu << " spot check on Re(lambda) >= " << k.sigma << "\n";
    return k;
}

Kernel make_kernel(const std::string& desc) {
    std::string name = desc;
    std::map<std::string, double> params;
    if (const auto colon = desc.find(':'); colon != std::string::npos) {
        name = desc.substr(0, colon);
        std::stringstream ss(desc.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw ArgumentError("make_kernel: malformed parameter '" + item + "'");
            try {
                params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw ArgumentError("make_kernel: bad numeric value in '" + item + "'");
            }
        }
    }
    const auto need = [&](const char* key) {
        const auto it = params.find(key);
        if (it == params.end())
            throw ArgumentError("make_kernel: kernel '" + name + "' needs parameter '" + key + "'");
        return it->second;
    };
    if (name == "fractional") return fractional_kernel(need("alpha"));
    if (name == "periodic_sum" || name == "periodic") return periodic_sum_kernel(need("mu"));
    if (name == "difference") return difference_kernel();
    if (name == "bessel") return bessel_kernel(need("omega"));
    if (name == "integration") return integration_kernel();
    if (name == "expdecay") return exp_decay_kernel();
    if (name == "identity")
        return custom_kernel("identity", [](Complex) { return Complex(1.0, 0.0); }, -1e300, 0.0,
                             [](int l, double t) { return std::pow(t, l); });
    throw ArgumentError("make_kernel: unknown kernel '" + name + "'");
}

}  // namespace bgacq
