#pragma once

#include <stdexcept>
#include <string>

namespace steinmix {

/// Bad input: wrong dimensions, invalid states, out-of-range parameters.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operands whose dimensions do not agree.
class DimensionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Requested blocklength or combinatorial size exceeds the configured cap.
class OverflowError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A numerical routine failed (eigensolver non-convergence and similar).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace steinmix
