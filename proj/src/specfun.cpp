#include "wavelab/specfun.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

namespace wavelab {

cplx hankel1(double nu, double z) {
  if (!(z > 0)) throw ValidationError("hankel1: z must be positive");
  return {boost::math::cyl_bessel_j(nu, z), boost::math::cyl_neumann(nu, z)};
}

cplx hankel1_derivative(double nu, double z) {
  // H'_nu = H_{nu-1} - (nu/z) H_nu; the nu-1 order may be negative, which
  // cyl_bessel_j / cyl_neumann accept
  if (!(z > 0)) throw ValidationError("hankel1: z must be positive");
  const cplx below{boost::math::cyl_bessel_j(nu - 1.0, z),
                   boost::math::cyl_neumann(nu - 1.0, z)};
  return below - (nu / z) * hankel1(nu, z);
}

OutgoingWave outgoing_wave(double nu, double lambda, double x) {
  if (!(nu >= 0)) throw ValidationError("outgoing_wave: nu must be nonnegative");
  if (!(lambda > 0) || !(x > 0))
    throw ValidationError("outgoing_wave: lambda and x must be positive");
  const double z = lambda * x;
  const double amp = std::sqrt(0.5 * kPi * z);
  const cplx phase = std::polar(1.0, 0.25 * kPi * (2.0 * nu + 1.0));
  const cplx h = hankel1(nu, z);
  const cplx hp = hankel1_derivative(nu, z);
  OutgoingWave out;
  out.value = amp * phase * h;
  out.derivative = lambda * phase * amp * (h / (2.0 * z) + hp);
  return out;
}

}  // namespace wavelab
