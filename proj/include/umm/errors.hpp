// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace umm {

/// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Target value not attained by the function being inverted.
class range_error : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Matrix that should be positive definite is not (numerically).
class singular_matrix_error : public std::runtime_error {
 public:
  singular_matrix_error(const std::string& what, double eigenvalue)
      : std::runtime_error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// AR coefficients whose characteristic polynomial has a root on or inside the unit circle.
class stability_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid or inconsistent configuration (dimensions, missing fields, model setup).
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace umm
