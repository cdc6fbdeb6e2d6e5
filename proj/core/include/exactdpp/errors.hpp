#pragma once

#include <stdexcept>
#include <string>

namespace exactdpp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or box argument lies outside its admissible domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The Gram matrix became numerically singular (duplicate or near-duplicate point).
class NearSingularError : public Error {
 public:
  using Error::Error;
};

/// The conditional density has (numerically) no mass left on [0,1].
class DegenerateDensityError : public Error {
 public:
  using Error::Error;
};

/// The finite-rank posterior precision is not positive definite.
class BasisConditioningError : public Error {
 public:
  using Error::Error;
};

/// Misuse of a brute-force oracle (dimension cap, zero acceptances, ...).
class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace exactdpp
