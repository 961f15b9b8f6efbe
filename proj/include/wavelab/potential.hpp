#pragma once
// Potential families for the operator H = -d^2/dx^2 + V(x) on the line.
//
// Families:
//   free                 V = 0
//   regge_wheeler        V = (1-2M/r)(l(l+1)/r^2 + 2 M sigma / r^3), r the
//                        Schwarzschild radius of the tortoise coordinate x
//   inverse_square_model V = 0 for x <= -1, (a^2-1/4)/x^2 for x >= 1, with a
//                        quintic bridge on [-1,1] matching value and two
//                        derivatives at both ends
//   surface_of_revolution
//                        angular mode l on a hyperboloid-like surface whose
//                        radius as a function of arclength is
//                        rho(s) = sqrt(neck^2 + s^2/2); both ends open into
//                        cones of half-angle pi/4
//   inverse_square_peak  V = strength / (1+x^2), a symmetric positive barrier
//   tabulated            cubic spline through samples, power-law tails
//
// classify_tails reports, per side, the asymptotic class the scattering and
// resonance code keys on. For inverse-square tails the stored nu satisfies
// nu^2 - 1/4 = lim x^2 V(x).

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wavelab/types.hpp"

namespace wavelab {

enum class TailKind { zero, exponential, inverse_square, inverse_cube };

const char* to_string(TailKind k);

struct TailClass {
  TailKind kind = TailKind::zero;
  // Bessel order of the comparison equation (inverse_square only).
  double nu = 0.5;
  // inverse_square: lim x^2 V = nu^2 - 1/4; inverse_cube: lim x^3 V;
  // exponential: decay rate; zero: unused.
  double coefficient = 0.0;
};

// Tortoise coordinate x = r + 2M log(r/2M - 1) of the Schwarzschild metric.
class TortoiseMap {
 public:
  explicit TortoiseMap(double mass);
  double mass() const { return mass_; }
  // x(r) for r > 2M.
  double coordinate(double r) const;
  // Inverse map. Safeguarded Newton; satisfies the defining relation to
  // 1e-12 relative to max(1, |x|).
  double radius(double x) const;
  // u = r/2M - 1. Near the horizon u underflows the spacing of doubles
  // around r = 2M, so callers needing 1 - 2M/r = u/(1+u) must use this
  // rather than subtract.
  double radius_excess(double x) const;

 private:
  double mass_;
};

struct FreePotential {};

struct ReggeWheelerPotential {
  double mass = 1.0;
  int ell = 0;
  int sigma = 1;  // 1 scalar, 0 gauge-trivial, -3 odd-parity metric mode
};

struct InverseSquareModelPotential {
  double a = 0.7;  // tail strength a^2 - 1/4 on the right
};

struct SurfaceOfRevolutionPotential {
  int ell = 1;
  double neck = 1.0;  // waist radius of the surface
};

struct InverseSquarePeakPotential {
  double strength = 2.0;
};

// Build through PotentialModel::tabulated, which fills the spline and the
// tail extrapolation state.
struct TabulatedPotential {
  std::vector<double> x;  // strictly increasing
  std::vector<double> v;
  std::vector<double> spline_d2;  // natural cubic spline second derivatives
  // clamped power-law extrapolation V(x) ~ v_end * (x_end/x)^p beyond the grid
  double p_left = 0.0, p_right = 0.0;
  bool tails_classified = false;
  TailClass tail_left, tail_right;
};

class PotentialModel;

// Internal wrapper used by the semiclassical cross-check: evaluates
// factor * (base(x) + iso/(1+x^2)). Tails scale accordingly.
struct ScaledCorrectedPotential {
  std::shared_ptr<const PotentialModel> base;
  double factor = 1.0;
  double iso = 0.0;
};

class PotentialModel {
 public:
  using Rep = std::variant<FreePotential, ReggeWheelerPotential,
                           InverseSquareModelPotential,
                           SurfaceOfRevolutionPotential,
                           InverseSquarePeakPotential, TabulatedPotential,
                           ScaledCorrectedPotential>;

  static PotentialModel free_line();
  static PotentialModel regge_wheeler(double mass, int ell, int sigma);
  static PotentialModel inverse_square_model(double a);
  static PotentialModel surface_of_revolution(int ell, double neck = 1.0);
  static PotentialModel inverse_square_peak(double strength);
  static PotentialModel tabulated(std::vector<double> x,
                                  std::vector<double> v);
  static PotentialModel scaled_corrected(const PotentialModel& base,
                                         double factor, double iso);

  double operator()(double x) const;
  std::pair<TailClass, TailClass> tails() const;  // (left, right)
  std::string name() const;
  const Rep& rep() const { return *rep_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(rep_.get());
  }

 private:
  explicit PotentialModel(Rep rep);
  // shared so that copies stay cheap and ScaledCorrected can alias safely
  std::shared_ptr<const Rep> rep_;
};

double evaluate_potential(const PotentialModel& m, double x);
std::pair<TailClass, TailClass> classify_tails(const PotentialModel& m);

}  // namespace wavelab
