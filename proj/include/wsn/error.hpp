#pragma once

#include <stdexcept>
#include <string>

namespace wsn {

// Base class for all errors raised by this project. Subclasses map onto the
// CLI exit-code categories (see tools/wsnctl.cpp).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input data does not satisfy a length precondition (series too short, etc).
class LengthError : public Error {
 public:
  using Error::Error;
};

// Wrong number of auxiliary values (e.g. initial values for integration).
class ArityError : public Error {
 public:
  using Error::Error;
};

// Model estimation failed (non-stationary/non-invertible after repair, or no
// candidate order could be fitted).
class FitError : public Error {
 public:
  using Error::Error;
};

// The two halves of the dual prediction scheme disagree about the protocol
// state. Always a hard error; never swallowed.
class DesyncError : public Error {
 public:
  using Error::Error;
};

// Two series that must share ticks have no overlap.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// A remote service could not be reached or answered with a transport-level
// failure.
class TransportError : public Error {
 public:
  using Error::Error;
};

// A named entity (sensor, location, command) is not known.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration, scenario, payload or trace input.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace wsn
