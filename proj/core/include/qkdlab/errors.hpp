#pragma once

#include <stdexcept>
#include <string>

namespace qkdlab {

/// Invalid or inconsistent configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A parameter lies outside the regime where a bound is valid. Exit code 3.
class RegimeError : public std::domain_error {
 public:
  RegimeError(std::string parameter, const std::string& message)
      : std::domain_error(parameter + ": " + message), parameter_(std::move(parameter)) {}

  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

/// Basis or axis information was requested before the protocol allows it.
class ProtocolOrderError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Not enough basis-matched positions to draw the configured test samples.
class UndersamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qkdlab
