#pragma once
// Shared aliases and the error taxonomy used across the library.
//
// ValidationError marks violated preconditions or malformed input; the CLI
// maps it to exit code 2. AccuracyError marks a computation that ran but
// could not meet its accuracy contract; the CLI maps it to exit code 3.

#include <complex>
#include <stdexcept>
#include <string>

namespace wavelab {

using cplx = std::complex<double>;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

// sqrt(1+x^2), the japanese bracket that shows up in every tail estimate
inline double jbracket(double x) { return std::sqrt(1.0 + x * x); }

}  // namespace wavelab
