#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: malformed parameters, failed hypothesis checks, bad geometry.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A structural hypothesis on the nonlinearity A failed on the sample grid.
class HypothesisError : public ConfigError {
public:
    HypothesisError(std::string hypothesis, const std::string& what)
        : ConfigError("hypothesis " + hypothesis + ": " + what), hypothesis_(std::move(hypothesis)) {}

    const std::string& hypothesis() const noexcept { return hypothesis_; }

private:
    std::string hypothesis_;
};

/// Operation called outside of its documented domain.
class PreconditionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class MeshError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double lo, double hi)
        : Error(what), lo_(lo), hi_(hi) {}

    /// Subinterval whose error estimate did not meet the tolerance.
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

class RootFindingError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

/// A verification property did not hold; carries a witness in the message.
class VerificationError : public Error {
public:
    using Error::Error;
};

}  // namespace plap
