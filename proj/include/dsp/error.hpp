#pragma once

#include <stdexcept>
#include <string>

namespace dsp {

// Bad distribution weights, PMF specs and other malformed inputs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (e.g. circle with n < m
// outside the extended formula, negative payment rate).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested n beyond the coefficient table or the stability cap.
class CapExceeded : public std::out_of_range {
 public:
  CapExceeded(const std::string& what, int requested, int cap)
      : std::out_of_range(what), requested_(requested), cap_(cap) {}
  int requested() const { return requested_; }
  int cap() const { return cap_; }

 private:
  int requested_;
  int cap_;
};

// Adaptive quadrature hit its depth limit before reaching the tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_estimate)
      : std::runtime_error(what), estimate_(estimate), error_estimate_(error_estimate) {}
  double estimate() const { return estimate_; }
  double error_estimate() const { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

// Malformed configuration file or command-line value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dsp
