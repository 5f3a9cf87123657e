// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mimopa {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-conformable or empty matrix/vector dimensions.
class DimensionError : public Error {
  public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

/// Parameter outside its mathematical domain (negative variance, zero step, ...).
class DomainError : public Error {
  public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Structurally degenerate input (zero column, all-zero vector, ...).
class DegenerateInputError : public Error {
  public:
    explicit DegenerateInputError(const std::string& msg) : Error(msg) {}
};

/// Matrix inversion refused; carries the condition-number estimate.
class SingularityError : public Error {
  public:
    SingularityError(const std::string& msg, double condition)
        : Error(msg + " (condition estimate " + std::to_string(condition) + ")"),
          condition_estimate(condition) {}
    double condition_estimate;
};

/// Gradient descent blew up; carries the offending step size.
class DivergenceError : public Error {
  public:
    DivergenceError(const std::string& msg, double mu)
        : Error(msg + " (step size mu=" + std::to_string(mu) + ")"), step_size(mu) {}
    double step_size;
};

/// Exhaustive-search grid would exceed the enumeration budget.
class SearchBudgetError : public Error {
  public:
    explicit SearchBudgetError(const std::string& msg) : Error(msg) {}
};

/// Configuration file problem; message carries file/line/field diagnostics.
class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Filesystem failure; message carries the path.
class IoError : public Error {
  public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace mimopa
