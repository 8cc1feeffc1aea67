#pragma once

#include <stdexcept>
#include <string>

namespace tradeoff {

// Error taxonomy. UsageError covers bad arguments and malformed inputs
// (things the caller can fix before computing); the remaining kinds are
// failures discovered while computing and map to a distinct process exit
// code in the command-line tool.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameter domains, malformed spec files, mismatched inputs.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A stated contract could not be met (asymmetric curve passed to the
// epsilon-delta conversion, operands without a realizable pair, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Q is not absolutely continuous w.r.t. P; carries the escaping Q-mass.
class ContiguityError : public Error {
 public:
  ContiguityError(const std::string& what, double escaping_mass)
      : Error(what), escaping_mass(escaping_mass) {}
  double escaping_mass;
};

// Floating-point range problems (overflow in a tilt, intensity overflow).
class RangeError : public Error {
 public:
  using Error::Error;
};

// A cross-check computed two ways disagreed beyond tolerance.
class ConsistencyError : public Error {
 public:
  ConsistencyError(const std::string& what, double gap) : Error(what), gap(gap) {}
  double gap;
};

// A domination/ordering assertion failed during verification.
class VerificationError : public Error {
 public:
  using Error::Error;
};

// A partition does not cover the support it is applied to.
class PartitionError : public Error {
 public:
  using Error::Error;
};

}  // namespace tradeoff
