#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace edflow {

// Malformed input: wrong shape, unknown field, inconsistent grid.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Well-formed input whose value is physically meaningless (negative times,
// fractions outside [0,1], ...).
class PhysicalRangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace edflow
