#pragma once

#include <stdexcept>
#include <string>

namespace focklab {

/// Raised when a computation would leave the binary64 amplitude budget
/// (inverse heat flow amplification, paper-mode centers). Maps to exit code 3.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the Berezin check when the degree-N projection of k_a is too lossy.
class ProjectionTailError : public std::runtime_error {
 public:
  ProjectionTailError(const std::string& what, double tail)
      : std::runtime_error(what), tail_(tail) {}
  double tail() const noexcept { return tail_; }

 private:
  double tail_;
};

/// Configuration / schema problems. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace focklab
