#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace motensor {

/// Rejected input: dimension mismatch, out-of-range index, invalid parameter.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dense object would exceed the configured logical-entry budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(double logical_entries, std::size_t budget)
      : std::runtime_error("logical entry count " + std::to_string(logical_entries) +
                           " exceeds budget " + std::to_string(budget)),
        logical_entries(logical_entries),
        budget(budget) {}

  double logical_entries;
  std::size_t budget;
};

/// An iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace motensor
