#pragma once

#include <stdexcept>
#include <string>

namespace entroflow {

// Malformed input text or schema violations. `where` is a field path such as
// "edges[2].capacity" or a byte offset description.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

// An operation's precondition does not hold (e.g. non-quasi-uniform input).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Enumeration or distribution size above the configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what, double fraction = 0.0)
      : std::runtime_error(what), fraction_(fraction) {}
  double fraction_searched() const noexcept { return fraction_; }

 private:
  double fraction_;
};

// Problem too large for the exact LP (ground set above limit).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace entroflow
