#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>

namespace geolab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, invalid surface parameters, point off
// the surface, violated operation hypotheses. CLI exit code 1.
struct InputError : Error {
  using Error::Error;
};

// A numerical routine failed (integration guard, no connection found,
// lift obstruction). Carries provenance in the message. CLI exit code 2.
struct NumericalError : Error {
  using Error::Error;
};

struct IntegrationError : NumericalError {
  IntegrationError(const std::string& what, double t)
      : NumericalError(what + " (t = " + std::to_string(t) + ")"), t_fail(t) {}
  double t_fail;
};

struct NoConnectionError : NumericalError {
  using NumericalError::NumericalError;
};

struct LiftObstructionError : NumericalError {
  LiftObstructionError(const std::string& what, std::size_t index)
      : NumericalError(what + " (sample " + std::to_string(index) + ")"),
        sample_index(index) {}
  std::size_t sample_index;
};

}  // namespace geolab
