#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace crum {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Point outside an analyticity strip or a physical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Requested feature is not supported (jet order cap, extended precision, ...).
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// Family parameters violate a constraint.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Evaluation hit a pole or a zero denominator.
class PoleError : public Error {
public:
    using Error::Error;
};

/// A ground state of some level has a node, so the next level is ill defined.
class ChainBreakError : public Error {
public:
    using Error::Error;
};

/// Square-root continuation jumped by more than a quarter turn.
class BranchError : public Error {
public:
    using Error::Error;
};

/// Index out of the admissible range (n < s, n beyond the tabulated range).
class IndexError : public Error {
public:
    using Error::Error;
};

/// Numerical procedure did not reach its tolerance.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, std::complex<double> best_estimate, double error_estimate)
        : Error(what), best_(best_estimate), err_(error_estimate) {}
    std::complex<double> best_estimate() const { return best_; }
    double error_estimate() const { return err_; }

private:
    std::complex<double> best_;
    double err_;
};

} // namespace crum
