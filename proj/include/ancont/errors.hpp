#pragma once

#include <stdexcept>
#include <string>

namespace ancont {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid domain, curve, sampling, or argument values.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range configuration input (CLI / JSON layer).
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Design matrix is numerically rank deficient for the requested basis.
class IllConditionedBasisError : public Error {
public:
    using Error::Error;
};

/// The LP cross-check could not produce a trustworthy certificate.
class OracleFailureError : public Error {
public:
    using Error::Error;
};

/// Adaptive ODE integration failed (step underflow near a singularity).
class IntegrationError : public Error {
public:
    using Error::Error;
};

}  // namespace ancont
