#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ponder {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when the drift matrix has an eigenvalue with non-negative real part.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, std::vector<std::complex<double>> offending)
      : Error(what), offending_(std::move(offending)) {}

  const std::vector<std::complex<double>>& offending_eigenvalues() const noexcept {
    return offending_;
  }

 private:
  std::vector<std::complex<double>> offending_;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// The criterion denominator vanished. Never a physical regime; signals a convention bug
/// or an evaluation at omega = 0.
class DegenerateCommutatorError : public Error {
 public:
  using Error::Error;
};

class PhysicalityError : public Error {
 public:
  PhysicalityError(const std::string& what, double margin) : Error(what), margin_(margin) {}
  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace ponder
