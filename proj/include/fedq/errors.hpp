#pragma once

#include <stdexcept>
#include <string>

namespace fedq {

/// Root of every error the engine throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite coefficients or exponents, mismatched dimensions.
class MalformedInput : public Error {
public:
    using Error::Error;
};

/// Errors raised while computing (as opposed to while reading a config).
/// The CLI maps every subclass to exit code 2.
class ComputationError : public Error {
public:
    using Error::Error;
};

/// An operation left the closed signomial class (multi-term reciprocal,
/// non-diagonal or multi-term Hessian).
class OutsideExpressionClass : public ComputationError {
public:
    using ComputationError::ComputationError;
};

/// Caputo power rule hit a pole of the numerator gamma function.
class FractionalDomainError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

/// Hessian entry vanishes at a sample point.
class RegularityError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class EvaluationDomainError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

/// Adaptive quadrature did not settle within its budget.
class QuadratureFailure : public ComputationError {
public:
    QuadratureFailure(const std::string& what, double previous, double last)
        : ComputationError(what), previous_estimate(previous), last_estimate(last) {}

    double previous_estimate;
    double last_estimate;
};

/// The Fedosov defining equation has a residual above threshold.
class FlatnessObstruction : public ComputationError {
public:
    FlatnessObstruction(const std::string& what, int deg, double res)
        : ComputationError(what), degree(deg), residual(res) {}

    int degree;
    double residual;
};

/// Invalid run configuration (exit code 3).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace fedq
