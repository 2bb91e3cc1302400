#pragma once

#include <stdexcept>
#include <string>

namespace levyspde {

// Config-file / cross-field validation failure. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A model hypothesis required by the requested operation does not hold.
// The message names the violated hypothesis.
class HypothesisError : public std::runtime_error {
public:
    explicit HypothesisError(const std::string& msg) : std::runtime_error(msg) {}
};

// A symbolic series decision cannot be made for this family/decay combination.
class UndecidableError : public std::runtime_error {
public:
    explicit UndecidableError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values produced while evaluating the drift; usually a too-large time step.
class OverflowError : public std::runtime_error {
public:
    explicit OverflowError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation not available for the given family (e.g. sampling the slow-log-tail law).
class UnsupportedError : public std::runtime_error {
public:
    explicit UnsupportedError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical routine (quadrature, root solve) failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace levyspde
