#pragma once

#include <stdexcept>
#include <string>

namespace potlab {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: negative densities, bad descriptors, inconsistent sizes.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string field = {})
      : Error(field.empty() ? message : field + ": " + message), message_(message), field_(std::move(field)) {}

  const std::string& message() const noexcept { return message_; }
  /// Dotted path of the offending descriptor field, empty when not applicable.
  const std::string& field() const noexcept { return field_; }

  /// Same error with `prefix` prepended to the field path.
  ValidationError nested(const std::string& prefix) const {
    return ValidationError(message_, field_.empty() ? prefix : prefix + "." + field_);
  }

 private:
  std::string message_;
  std::string field_;
};

/// Argument outside the domain on which a function is represented.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Value that cannot be bracketed by an inversion.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside its admissible interval.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual, int iterations)
      : Error(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

}  // namespace potlab
