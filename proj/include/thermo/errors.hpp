#ifndef THERMO_ERRORS_HPP
#define THERMO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace thermo {

/// Root of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument lies outside the region where the operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller-side contract was broken (e.g. truncation level below 2).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A point sits on (or within tolerance of) a partition endpoint.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// The transition structure is not irreducible and aperiodic.
class MixingError : public Error {
 public:
  using Error::Error;
};

/// No periodic word of the requested length passes through the base symbol.
class EmptySumError : public Error {
 public:
  using Error::Error;
};

/// Enumeration would exceed the configured work budget.
class WorkLimitError : public Error {
 public:
  using Error::Error;
};

class UnboundedError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Potentials bound to different maps were combined.
class CompositionError : public Error {
 public:
  using Error::Error;
};

class InsufficientSampleError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration file; the message names the offending field.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace thermo

#endif  // THERMO_ERRORS_HPP
