#pragma once

#include <stdexcept>
#include <string>

namespace opmeans {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration: unknown generator, bad parameter range, malformed
/// problem data (weights, dimensions), misuse of an API contract.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A scalar function was evaluated outside its domain (non-finite result at
/// an eigenvalue).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A matrix failed a conditioning requirement (SPD floor, singular congruence
/// transform).
class ConditioningError : public Error {
public:
  using Error::Error;
};

/// An iterative numeric routine failed to converge within its budget
/// (eigensolver sweeps, root bracketing, quadrature recursion).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// The requested operation is not available for the given inputs
/// (e.g. an objective evaluation for a generator without f).
class UnsupportedError : public Error {
public:
  using Error::Error;
};

}  // namespace opmeans
