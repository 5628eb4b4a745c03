#pragma once

#include <stdexcept>
#include <string>

namespace ksg {

// Invalid user-facing configuration (bad parameter, bad grid, bad file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FailureKind { NonFinite, PositivityLoss, SolverDivergence, DtCollapse };

const char* to_string(FailureKind kind);

// The numerical scheme could not continue; carries the category so the
// simulation driver can map it to a termination status.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(FailureKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  FailureKind kind() const noexcept { return kind_; }

 private:
  FailureKind kind_;
};

}  // namespace ksg
