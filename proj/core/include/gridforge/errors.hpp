#ifndef GRIDFORGE_ERRORS_HPP
#define GRIDFORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gridforge {

// Base class for all gridforge exceptions so callers can catch broadly.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Simple-cycle enumeration found more cycles than the caller's budget.
class CycleBudgetExceeded : public Error {
 public:
  CycleBudgetExceeded(std::size_t found, std::size_t budget)
      : Error("cycle enumeration exceeded budget: found more than " +
              std::to_string(budget) + " simple cycles"),
        found_at_least(found),
        budget(budget) {}
  std::size_t found_at_least;
  std::size_t budget;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name)
      : Error("unknown variable: " + name) {}
};

class ValueOutOfBounds : public Error {
 public:
  ValueOutOfBounds(const std::string& name, double value)
      : Error("value " + std::to_string(value) + " out of bounds for variable " + name) {}
};

// Two distinct names mapped to the same sanitized MPS token.
class NameCollision : public Error {
 public:
  explicit NameCollision(const std::string& token)
      : Error("name collision after sanitization: " + token) {}
};

class TooLarge : public Error {
 public:
  explicit TooLarge(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& context, const std::string& detail)
      : Error("parse error in " + context + ": " + detail), context(context) {}
  std::string context;
};

class SchemaVersionMismatch : public Error {
 public:
  SchemaVersionMismatch(int found, int expected)
      : Error("unsupported schema_version " + std::to_string(found) +
              " (expected " + std::to_string(expected) + ")") {}
};

}  // namespace gridforge

#endif
