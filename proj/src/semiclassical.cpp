#include "wavelab/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "wavelab/types.hpp"
#include "wavelab/numerics.hpp"
#include "wavelab/scattering.hpp"

namespace wavelab {

namespace {

// V0 = V + iso/(1+x^2); iso is hbar^2/4, or 0 for the uncorrected variant.
struct Barrier {
  const PotentialModel* model;
  double iso;
  double operator()(double x) const {
    return (*model)(x) + iso / (1.0 + x * x);
  }
};

void check_pair(double energy, double hbar) {
  if (!(energy > 0.0) || !std::isfinite(energy))
    throw ValidationError("semiclassical: energy must be positive");
  if (!(hbar > 0.0) || !(hbar < 1.0))
    throw ValidationError("semiclassical: hbar must lie in (0, 1)");
}

struct Peak {
  double x = 0.0;
  double v = 0.0;
};

// Coarse scan over the barrier region followed by a ternary refinement.
// The refined abscissa is only good to about sqrt(eps), but the value at a
// smooth maximum is then converged to machine precision, which is what the
// regime test needs.
Peak barrier_peak(const Barrier& v0) {
  double bx = 0.0;
  double bv = -std::numeric_limits<double>::infinity();
  for (double x = -60.0; x <= 60.0 + 1e-12; x += 0.05) {
    const double v = v0(x);
    if (v > bv) {
      bv = v;
      bx = x;
    }
  }
  double lo = bx - 0.05, hi = bx + 0.05;
  while (hi - lo > 1e-9) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (v0(m1) < v0(m2))
      lo = m1;
    else
      hi = m2;
  }
  Peak p;
  p.x = 0.5 * (lo + hi);
  p.v = v0(p.x);
  return p;
}

// One root of V0 = E strictly on side dir of the barrier top, plus a probe
// beyond it for a second crossing, which would put the energy outside the
// single-barrier regime the actions are built for.
double march_root(const Barrier& v0, double E, double xc, int dir) {
  double prev = xc;
  double step = 1e-3 * (1.0 + std::abs(xc));
  double a = 0.0, b = 0.0;
  bool found = false;
  for (int k = 0; k < 400; ++k) {
    const double next = prev + dir * step;
    if (v0(next) - E <= 0.0) {
      a = std::min(prev, next);
      b = std::max(prev, next);
      found = true;
      break;
    }
    prev = next;
    step *= 1.25;
    if (std::abs(next) > 1e9) break;
  }
  if (!found)
    throw ValidationError(
        "turning_points: the energy line is never crossed on one side of "
        "the barrier top");
  const double root = solve_bracketed([&](double x) { return v0(x) - E; }, a,
                                      b, 1e-13 * (1.0 + std::abs(b)));

  // probe outward: V0 must stay below E from here on. The step is capped
  // at a few percent of the distance out so a second bump cannot be
  // vaulted over on the scales the models vary on.
  double x = root + dir * step;
  double probe = std::max(step, 0.05 * (1.0 + std::abs(root)));
  const double stop = std::max(50.0 * (1.0 + std::abs(root)), 1000.0);
  while (std::abs(x) < stop) {
    if (v0(x) - E > 0.0)
      throw ValidationError(
          "turning_points: not in the single-barrier regime: the energy "
          "line meets the potential more than once per side");
    probe = std::min(probe * 1.25, 0.5 + 0.05 * std::abs(x));
    x += dir * probe;
  }
  return root;
}

std::pair<double, double> turning_pair(const Barrier& v0, double E) {
  const Peak top = barrier_peak(v0);
  if (!(top.v > 0.0))
    throw ValidationError("turning_points: the potential has no positive "
                          "barrier maximum");
  if (!(E < top.v))
    throw ValidationError(
        "turning_points: not in the semiclassical regime: the energy is at "
        "or above the barrier top " +
        std::to_string(top.v));
  const double x1 = march_root(v0, E, top.x, +1);
  const double x2 = march_root(v0, E, top.x, -1);
  return {x2, x1};
}

double integrate_doubling(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, const char* what) {
  if (!(b > a)) return 0.0;
  double prev = integrate_gauss(f, a, b, 8);
  for (int panels = 16; panels <= 8192; panels *= 2) {
    const double cur = integrate_gauss(f, a, b, panels);
    if (std::abs(cur - prev) < abs_tol) return cur;
    prev = cur;
  }
  throw AccuracyError(std::string(what) +
                      ": quadrature did not settle under node doubling");
}

double barrier_action(const Barrier& v0, double E, double x2, double x1) {
  const double mid = 0.5 * (x1 + x2);
  auto from_left = [&](double u) {  // u^2 = x - x2
    const double x = x2 + u * u;
    return 2.0 * u * std::sqrt(std::max(v0(x) - E, 0.0));
  };
  auto from_right = [&](double u) {  // u^2 = x1 - x
    const double x = x1 - u * u;
    return 2.0 * u * std::sqrt(std::max(v0(x) - E, 0.0));
  };
  return integrate_doubling(from_left, 0.0, std::sqrt(mid - x2), 1e-10,
                            "action_integrals") +
         integrate_doubling(from_right, 0.0, std::sqrt(x1 - mid), 1e-10,
                            "action_integrals");
}

// integral over (X, inf) of sqrt(E - c/s^2) - sqrt(E), in closed form
double pure_tail(double E, double c, double X) {
  if (c <= 0.0) return 0.0;
  const double r = std::sqrt(E * X * X - c);
  const double sc = std::sqrt(c);
  return std::sqrt(E) * X - r + sc * (std::atan(r / sc) - std::numbers::pi / 2);
}

// Inverse-square coefficient governing the far part of one side.
double side_tail_coefficient(const PotentialModel& model, int dir,
                             double iso) {
  const auto [left, right] = model.tails();
  const TailClass& t = dir > 0 ? right : left;
  const double c =
      t.kind == TailKind::inverse_square ? t.coefficient : 0.0;
  return std::max(c, 0.0) + iso;
}

// t_side = |xt| sqrt(E) - integral over the allowed side of
// sqrt(E - V0) - sqrt(E). Turning-point end by the u^2 substitution, the
// middle by plain panels in s = dir * x, the far end by the closed form
// above once doubling X stops moving the total.
double phase_action(const Barrier& v0, double E, double xt, int dir,
                    double cside) {
  const double sE = std::sqrt(E);
  const double W = 1.0 + 1.5 * std::abs(xt);
  auto near = [&](double u) {  // u^2 = distance past the turning point
    const double x = xt + dir * u * u;
    return 2.0 * u * (std::sqrt(std::max(E - v0(x), 0.0)) - sE);
  };
  double acc = integrate_doubling(near, 0.0, std::sqrt(W), 5e-11,
                                  "action_integrals");

  auto far = [&](double s) {
    const double x = dir > 0 ? s : -s;
    return std::sqrt(std::max(E - v0(x), 0.0)) - sE;
  };
  const double s0 = dir * xt + W;
  double X = std::max({2.0 * std::abs(s0),
                       2.0 * std::sqrt(std::max(cside, 0.0) / E), 50.0});
  acc += integrate_doubling(far, s0, X, 5e-11, "action_integrals");

  double value = acc + pure_tail(E, cside, X);
  for (int k = 0;; ++k) {
    if (k >= 40)
      throw AccuracyError(
          "action_integrals: far integral did not converge onto its "
          "inverse-square tail");
    const double X2 = 2.0 * X;
    acc += integrate_doubling(far, X, X2, 5e-11, "action_integrals");
    const double next = acc + pure_tail(E, cside, X2);
    const bool settled = std::abs(next - value) < 5e-11;
    value = next;
    X = X2;
    if (settled) break;
  }
  return std::abs(xt) * sE - value;
}

WkbData wkb_data(const PotentialModel& model, double energy, double hbar,
                 double iso) {
  const Barrier v0{&model, iso};
  const auto [x2, x1] = turning_pair(v0, energy);
  WkbData d;
  d.energy = energy;
  d.hbar = hbar;
  d.x2 = x2;
  d.x1 = x1;
  d.action = barrier_action(v0, energy, x2, x1);
  d.t_plus = phase_action(v0, energy, x1, +1,
                          side_tail_coefficient(model, +1, iso));
  d.t_minus = phase_action(v0, energy, x2, -1,
                           side_tail_coefficient(model, -1, iso));
  d.t_total = d.t_plus + d.t_minus;
  d.sigma11_abs = std::exp(-d.action / hbar);
  return d;
}

}  // namespace

double corrected_potential(const PotentialModel& model, double hbar,
                           double x) {
  if (!(hbar > 0.0) || !(hbar < 1.0))
    throw ValidationError("corrected_potential: hbar must lie in (0, 1)");
  return model(x) + 0.25 * hbar * hbar / (1.0 + x * x);
}

std::pair<double, double> turning_points(const PotentialModel& model,
                                         double energy, double hbar) {
  check_pair(energy, hbar);
  const Barrier v0{&model, 0.25 * hbar * hbar};
  return turning_pair(v0, energy);
}

WkbData action_integrals(const PotentialModel& model, double energy,
                         double hbar) {
  check_pair(energy, hbar);
  return wkb_data(model, energy, hbar, 0.25 * hbar * hbar);
}

LangerChart langer_variable(const PotentialModel& model, double energy,
                            double hbar, const std::vector<double>& x_grid) {
  check_pair(energy, hbar);
  if (x_grid.empty())
    throw ValidationError("langer_variable: empty sample grid");
  if (!(x_grid.front() >= 0.0))
    throw ValidationError(
        "langer_variable: the chart lives on the x >= 0 branch");
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!std::isfinite(x_grid[i]))
      throw ValidationError("langer_variable: grid values must be finite");
    if (i > 0 && !(x_grid[i] > x_grid[i - 1]))
      throw ValidationError(
          "langer_variable: grid must be strictly ascending");
  }

  const Barrier v0{&model, 0.25 * hbar * hbar};
  const auto [x2, x1] = turning_pair(v0, energy);
  (void)x2;

  // limit of q at the turning point, from the local slope of the barrier
  const double h = 1e-5 * (1.0 + std::abs(x1));
  const double slope = (v0(x1 + h) - v0(x1 - h)) / (2.0 * h);
  const double q_limit = std::pow(std::abs(slope), 2.0 / 3.0);

  LangerChart chart;
  chart.energy = energy;
  chart.hbar = hbar;
  chart.x = x_grid;
  chart.zeta.reserve(x_grid.size());
  chart.q.reserve(x_grid.size());
  for (double x : x_grid) {
    const double d = x - x1;
    const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    double zeta = 0.0;
    if (sgn != 0.0) {
      auto f = [&](double u) {  // u^2 = |distance from the turning point|
        const double xx = x1 + sgn * u * u;
        return 2.0 * u * std::sqrt(std::abs(v0(xx) - energy));
      };
      const double integral = integrate_doubling(
          f, 0.0, std::sqrt(std::abs(d)), 1e-11, "langer_variable");
      zeta = sgn * std::pow(1.5 * integral, 2.0 / 3.0);
    }
    chart.zeta.push_back(zeta);
    chart.q.push_back(std::abs(d) < 1e-7 ? q_limit
                                         : (energy - v0(x)) / zeta);
  }
  return chart;
}

WkbComparison wkb_vs_exact(const PotentialModel& model, double energy,
                           double hbar, bool corrected) {
  check_pair(energy, hbar);
  const WkbData d =
      wkb_data(model, energy, hbar, corrected ? 0.25 * hbar * hbar : 0.0);

  // -hbar^2 f'' + V0 f = E f is -f'' + (V0/hbar^2) f = lambda^2 f at
  // lambda = sqrt(E)/hbar.  The exact problem always carries the barrier
  // lift: the flag only chooses which action goes into e^{-S/hbar}.
  const PotentialModel scaled = PotentialModel::scaled_corrected(
      model, 1.0 / (hbar * hbar), 0.25 * hbar * hbar);
  const ScatteringProblem exact(scaled);
  const double lambda = std::sqrt(energy) / hbar;
  const double t = std::abs(exact.coefficients(lambda).transmission);
  if (!(t > 0.0))
    throw AccuracyError(
        "wkb_vs_exact: the exact transmission underflowed; the barrier is "
        "too opaque at these parameters");

  WkbComparison out;
  out.abs_sigma11 = d.sigma11_abs;
  out.abs_t_exact = t;
  out.rel_dev = std::abs(d.sigma11_abs - t) / t;
  return out;
}

}  // namespace wavelab
