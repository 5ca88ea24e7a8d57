#pragma once

#include <stdexcept>
#include <string>

namespace covmech {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Chart / geometry failures.
class OutOfDomain : public Error { using Error::Error; };
class SingularMetric : public Error { using Error::Error; };

// Tensor algebra.
class RankZeroOperand : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };

// Catalog construction.
class ExtremalParams : public Error { using Error::Error; };
class DetunedParameters : public Error { using Error::Error; };
class UnknownName : public Error { using Error::Error; };

// Integration failures (DomainStop is a status, not an error).
class MaxStepsExceeded : public Error { using Error::Error; };
class NonFiniteState : public Error { using Error::Error; };

// Differentiation of a closure that cannot be differentiated the requested way.
class DifferentiationError : public Error { using Error::Error; };

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : "config field '" + field + "': " + what),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace covmech
