/// @file error.hpp
/// @brief Exception types shared by the library and the CLI.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace helivort {

/// Argument outside the mathematical domain of an operation
/// (coincident points in the singular kernel, R > 1 in the rearrangement bound, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid configuration or inconsistent inputs.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical abort: the caller asked for something the integrator or the
/// solver could not deliver. Maps to exit code 3 in the CLI.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public NumericalError {
public:
    SolverError(const std::string &what, std::vector<double> residuals)
        : NumericalError(what), residuals_(std::move(residuals)) {}

    /// Relative residual after each iteration.
    const std::vector<double> &residual_history() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

class StabilityError : public NumericalError {
public:
    StabilityError(const std::string &what, double suggested_dt)
        : NumericalError(what), suggested_dt_(suggested_dt) {}

    double suggested_dt() const { return suggested_dt_; }

private:
    double suggested_dt_;
};

class EscapeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace helivort
