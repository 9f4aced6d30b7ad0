#pragma once

#include <stdexcept>
#include <string>

namespace sacher {

// Raised when a caller breaks an operation's precondition (shape mismatch,
// stale gradient tape, undersized buffer).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Raised when a network or loss produces NaN/Inf during training.
class NumericalFault : public std::runtime_error {
 public:
  explicit NumericalFault(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sacher
