#pragma once

#include <stdexcept>
#include <string>

namespace vcp {

/// Malformed input, failed precondition, or unusable configuration.
/// The CLI maps these to exit status 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A well-formed request whose computation is undefined or failed
/// (zero velocity, rank-deficient design, unreachable power, ...).
/// The CLI maps these to exit status 2.
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

}  // namespace vcp
