#pragma once

#include <stdexcept>
#include <string>

namespace leibenson {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (p <= 1, q <= 0, x_norm = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// (p, q) outside the slow-diffusion regime q(p-1) > 1.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Evaluation exactly on the free boundary where the quantity is unbounded.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at the origin (or another excluded set) where the quantity is unbounded.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class EmptyEnsemble : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace leibenson
