#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace tlsloss {

// Root of everything this library throws on a contract violation or a
// numerical failure. Callers that only want "did it work" catch this.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function (pole, x <= 0, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

// Adaptive quadrature ran out of subdivisions or hit a non-finite integrand.
// `best_estimate` is always the current global sum; `abscissa` is set only
// when the integrand itself misbehaved.
class QuadratureError : public Error {
public:
  QuadratureError(const std::string& what, double best_estimate, double error_estimate,
                  double abscissa = std::numeric_limits<double>::quiet_NaN())
      : Error(what), best_estimate(best_estimate), error_estimate(error_estimate),
        abscissa(abscissa) {}
  double best_estimate;
  double error_estimate;
  double abscissa;
};

class BracketError : public Error {
public:
  using Error::Error;
};

// Design matrix / normal equations without full rank.
class DegenerateError : public Error {
public:
  using Error::Error;
};

// Resonance dip or spectral feature not detectable above the noise.
class NotFoundError : public Error {
public:
  using Error::Error;
};

// A measured value that the model cannot reach on the requested interval.
class OutOfRangeError : public Error {
public:
  OutOfRangeError(const std::string& what, double lower, double upper)
      : Error(what), lower(lower), upper(upper) {}
  double lower;
  double upper;
};

class ConvergenceError : public Error {
public:
  using Error::Error;
};

// Malformed input file or configuration. `field` names the offending entry.
class SchemaError : public Error {
public:
  SchemaError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field(field) {}
  std::string field;
};

}  // namespace tlsloss
