#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace maxlab {

/// Argument outside the mathematical domain of a kernel (dimension, radius, height...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent input document. Carries the offending field path.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A well-formed request that is not meaningful in the given context.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace maxlab
