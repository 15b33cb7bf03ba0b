#pragma once

#include <stdexcept>
#include <string>

namespace ellip {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the documented domain of a routine.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Coefficient field fails (uniform) ellipticity.
class EllipticityError : public Error {
 public:
  EllipticityError(const std::string& msg, long cell) : Error(msg), cell_(cell) {}
  long cell() const noexcept { return cell_; }

 private:
  long cell_;
};

// Semigroup parameter outside the admissible sector.
class SectorError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace ellip
