#pragma once
// Small numerical utilities: least squares on a line, Gauss-Legendre and
// Gauss-Kronrod panel rules, root bracketing helpers, and the smooth
// cutoff used to truncate energy integrals.

#include <cstddef>
#include <functional>
#include <vector>

#include "wavelab/types.hpp"

namespace wavelab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares y ~ slope*x + intercept. Requires n >= 2.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Nodes and weights of a quadrature rule on [a, b].
struct PanelRule {
  std::vector<double> x;
  std::vector<double> w;
};

// 16-point Gauss-Legendre rule mapped to [a, b].
PanelRule gauss16(double a, double b);

// 15-point Gauss-Kronrod rule on [a, b] together with the weights of the
// embedded 7-point Gauss rule (zero where the node is Kronrod-only).
struct KronrodRule {
  std::vector<double> x;
  std::vector<double> w_kronrod;
  std::vector<double> w_gauss;
};
KronrodRule kronrod15(double a, double b);

// Composite Gauss-Legendre integration with fixed panel count.
double integrate_gauss(const std::function<double(double)>& f, double a,
                       double b, int panels = 8);

// C-infinity transition: 1 on (-inf, 0], 0 on [1, inf), strictly
// decreasing in between. Built from exp(-1/s^2) bumps so that every
// derivative vanishes at both ends.
double smooth_step_down(double s);

// Bisection refined by secant steps; f(a) and f(b) must bracket a root.
double solve_bracketed(const std::function<double(double)>& f, double a,
                       double b, double tol);

}  // namespace wavelab
