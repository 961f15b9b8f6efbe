#pragma once
// Two-parameter WKB objects for -hbar^2 d^2/dx^2 + V with a positive
// barrier: turning points, barrier and phase actions, the Langer variable,
// and the tunneling amplitude exp(-S/hbar) checked against the exact
// transmission of the same operator.
//
// All of it is built on the corrected barrier
//
//   V0(x) = V(x) + (hbar^2/4) / (1 + x^2) ,
//
// whose extra inverse-square term keeps the WKB approximation uniform down
// to zero energy over an inverse-square tail; without it the approximation
// picks up an error that grows as the energy shrinks. The comparison
// operation exposes the uncorrected variant to make that visible.

#include <utility>
#include <vector>

#include "wavelab/potential.hpp"

namespace wavelab {

// The corrected barrier V0 at one point.
double corrected_potential(const PotentialModel& model, double hbar, double x);

// Actions of one (E, hbar) pair. x2 < x1 are the roots of V0 = E around the
// barrier top, action integrates sqrt(V0 - E) between them, and the phase
// actions collect the travel-time corrections on the classically allowed
// sides:
//
//   t_plus  =  x1 sqrt(E) - integral over (x1, inf)  of sqrt(E - V0) - sqrt(E)
//   t_minus = -x2 sqrt(E) - integral over (-inf, x2) of sqrt(E - V0) - sqrt(E)
//
// Invariants: |V0(x_i) - E| < 1e-10, action > 0, t_total = t_plus + t_minus,
// sigma11_abs = exp(-action / hbar).
struct WkbData {
  double energy = 0.0;
  double hbar = 0.0;
  double x2 = 0.0;
  double x1 = 0.0;
  double action = 0.0;
  double t_plus = 0.0;
  double t_minus = 0.0;
  double t_total = 0.0;
  double sigma11_abs = 0.0;
};

// The Langer variable zeta on the x >= 0 branch,
//
//   zeta(x) = sign(x - x1) * | (3/2) integral from x1 to x of
//                              sqrt(|V0 - E|) |^(2/3) ,
//
// sampled on a caller grid, together with q = (E - V0)/zeta. zeta is
// strictly increasing and changes sign exactly at x1; q stays positive
// through the turning point (its limit there is |V0'(x1)|^(2/3)).
struct LangerChart {
  double energy = 0.0;
  double hbar = 0.0;
  std::vector<double> x;
  std::vector<double> zeta;
  std::vector<double> q;
};

struct WkbComparison {
  double abs_sigma11 = 0.0;  // exp(-action / hbar)
  double abs_t_exact = 0.0;  // |T| of the same operator, solved exactly
  double rel_dev = 0.0;      // | abs_sigma11 - abs_t_exact | / abs_t_exact
};

// Roots (x2, x1) of V0 = E on either side of the barrier top. Refuses
// energies at or above the top and barriers the energy line meets more than
// once per side (outside the regime the actions are built for).
std::pair<double, double> turning_points(const PotentialModel& model,
                                         double energy, double hbar);

// Barrier and phase actions; quadratures are turning-point adapted
// (u^2 = |x - x_i|) and settled to 1e-9 absolute by node doubling, with the
// far inverse-square part of the phase actions summed in closed form.
WkbData action_integrals(const PotentialModel& model, double energy,
                         double hbar);

// Langer chart over x_grid (nonnegative, strictly ascending).
LangerChart langer_variable(const PotentialModel& model, double energy,
                            double hbar, const std::vector<double>& x_grid);

// exp(-S/hbar) against the exact transmission of -hbar^2 d^2/dx^2 + V0 at
// energy E, i.e. scattering for the scaled potential V0/hbar^2 at
// lambda = sqrt(E)/hbar. With corrected = false the action is taken from
// the bare V instead of V0; the exact side is the same operator either way,
// so the flag isolates what the barrier lift does to the exponent.
WkbComparison wkb_vs_exact(const PotentialModel& model, double energy,
                           double hbar, bool corrected = true);

}  // namespace wavelab
