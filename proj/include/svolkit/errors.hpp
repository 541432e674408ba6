#pragma once

#include <stdexcept>
#include <string>

namespace svolkit {

// Failures of a numerical method (quadrature, inversion, simulation underflow).
// The CLI maps everything derived from this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what, std::string axis = {})
        : NumericalError(axis.empty() ? what : what + " [axis: " + axis + "]"), axis_(std::move(axis)) {}
    const std::string& axis() const noexcept { return axis_; }

private:
    std::string axis_;
};

class NonFiniteIntegrand : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class UnstableInversion : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonPositiveVol : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Bad time arguments (t <= 0 or beyond the model horizon).
class InvalidHorizon : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Pricing refused because the asset is not a true martingale (rho > 0).
class MartingaleViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace svolkit
