#pragma once
// Outgoing-wave basis for the pure inverse-square far field.
//
// -u'' + (nu^2 - 1/4) x^-2 u = lambda^2 u has the solution
//   u(x) = sqrt(pi lambda x / 2) e^{i(2 nu + 1) pi/4} H1_nu(lambda x),
// the unique one behaving like e^{i lambda x} as x -> +inf. At nu = 1/2 it
// is e^{i lambda x} on the nose.

#include "wavelab/types.hpp"

namespace wavelab {

// H1_nu(z) = J_nu(z) + i Y_nu(z) and its z-derivative, real order, z > 0.
cplx hankel1(double nu, double z);
cplx hankel1_derivative(double nu, double z);

struct OutgoingWave {
  cplx value;
  cplx derivative;  // d/dx at fixed lambda
};

// The normalized solution above. Requires nu >= 0, lambda > 0, x > 0.
OutgoingWave outgoing_wave(double nu, double lambda, double x);

}  // namespace wavelab
