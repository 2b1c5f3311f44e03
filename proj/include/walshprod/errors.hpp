#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace walshprod {

/// Operands live on hypercubes of different dimension (or shapes disagree).
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration would exceed the configured work cap.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double requested, double cap)
      : std::runtime_error(what), requested_(requested), cap_(cap) {}

  double requested() const { return requested_; }
  double cap() const { return cap_; }

 private:
  double requested_;
  double cap_;
};

/// Malformed or out-of-range configuration (CLI exit code 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace walshprod
