#pragma once

#include <stdexcept>
#include <string>

namespace mpl {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller-supplied argument is malformed (dimension mismatch, bad flag, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A model object violates its own well-formedness rules.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not defined for this input class.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// An operation that requires Schur stability received an unstable matrix.
class Unstable : public Error {
 public:
  using Error::Error;
};

/// A matrix does not have the rank the operation requires.
class RankMismatch : public Error {
 public:
  using Error::Error;
};

/// Randomized generation exhausted its resampling budget.
class GenerationFailed : public Error {
 public:
  using Error::Error;
};

/// A constrained program has an empty feasible set.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// An inference attack cannot proceed on the given data.
class AttackFailed : public Error {
 public:
  using Error::Error;
};

/// A problem file or report could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace mpl
