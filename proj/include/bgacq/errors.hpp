#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bgacq {

/// Invalid argument or violated precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Generic numerical failure (non-convergence, ill-conditioning, ...).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A linear solve hit a (near-)singular matrix; carries the offending point.
class SingularityError : public NumericError {
public:
    SingularityError(const std::string& what, std::complex<double> where)
        : NumericError(what), point(where) {}
    std::complex<double> point;
};

/// An evaluation point left the kernel's analyticity region.
class KernelDomainError : public NumericError {
public:
    KernelDomainError(const std::string& what, std::complex<double> where)
        : NumericError(what), point(where) {}
    std::complex<double> point;
};

/// The kernel lacks metadata required by the requested operation.
class UnsupportedKernelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The reference quadrature failed to reach the requested tolerance.
class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fitted model did not describe the data (diagnostic, not numerical).
class DiagnosticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bgacq
