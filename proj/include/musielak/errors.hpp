#pragma once

#include <stdexcept>
#include <string>

namespace musielak {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (negative t, lambda < 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Arrays or grids that should share a node set do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A critical exponent r* or r_* requested with r >= N.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Root finder, bisection or quadrature failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Exponent data violate the growth hypotheses an operation requires.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a precondition on otherwise well-formed data
/// (boundary condition not satisfied, incompatible Neumann data, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace musielak
