#pragma once

#include <stdexcept>
#include <string>

namespace kipsim {

// Configuration / validation problems: bad parameters, malformed scenario
// files, incompatible option combinations. CLI maps these to exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime numerical failures: instability, domain violations, failed
// root finds, rejected decompositions. CLI maps these to exit code 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside an evaluator's mathematical domain (e.g. rho <= 0).
class DomainError : public NumericError {
public:
    explicit DomainError(const std::string& what) : NumericError(what) {}
};

// Value outside the range of an invertible map (e.g. kappa_inverse).
class RangeError : public NumericError {
public:
    explicit RangeError(const std::string& what) : NumericError(what) {}
};

// Polar decomposition rejected (vanishing density on the support interior).
class DecompositionError : public NumericError {
public:
    explicit DecompositionError(const std::string& what) : NumericError(what) {}
};

// Time integration failed (stability bound violation, NaN, norm blow-up).
class IntegrationError : public NumericError {
public:
    explicit IntegrationError(const std::string& what) : NumericError(what) {}
};

}  // namespace kipsim
