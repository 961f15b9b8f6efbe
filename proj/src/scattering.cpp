#include "wavelab/scattering.hpp"

#include <algorithm>
#include <array>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "wavelab/numerics.hpp"
#include "wavelab/specfun.hpp"

namespace wavelab {
namespace {

namespace ode = boost::numeric::odeint;

using CState = std::array<cplx, 2>;
using RState = std::array<double, 2>;

struct SideView {
  int s = +1;
  TailClass tail;
  const PotentialModel* model = nullptr;
  double v(double xi) const { return (*model)(s > 0 ? xi : -xi); }
};

// int_a^b g(t) e^{i freq t} dt for smooth g sampled at the 16 Gauss nodes
// of [a, b]. Expanding g in Legendre polynomials makes the oscillation
// exact: int_{-1}^{1} P_k(u) e^{i w u} du = 2 i^k j_k(w).
cplx filon_panel(const PanelRule& rule, const std::vector<cplx>& g, double a,
                 double b, double freq) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double w = freq * half;
  cplx acc = 0.0;
  cplx ik = 1.0;
  for (int k = 0; k <= 13; ++k) {
    cplx ck = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double u = (rule.x[i] - mid) / half;
      ck += rule.w[i] * g[i] * boost::math::legendre_p(k, u);
    }
    ck *= (2.0 * k + 1.0) / (b - a);
    acc += ck * 2.0 * ik * boost::math::sph_bessel(unsigned(k), w);
    ik *= cplx(0.0, 1.0);
  }
  return half * std::polar(1.0, freq * mid) * acc;
}

struct TailCorrection {
  cplx q = 1.0;   // multiplies the reference wave at the seed point
  cplx qp = 0.0;  // d/dxi of that factor
};

// First-order correction for the part of the potential beyond the seed
// point, from the variation-of-parameters form of f = u q,
//   q(x) = 1 + int_x^inf u(t)^2 [int_x^t u^-2] Vt(t) q(t) dt ,
// with q set to 1 inside the integral. For the 1/xi^2 reference the inner
// primitive has the closed form [R(x) - R(t)] / (2 i lambda) with
// R = H2_nu/H1_nu, so with J = (pi lambda t/2) |H1|^2 (smooth) and
// P = (pi lambda t/2) H1^2 (oscillatory),
//   q(X)  = 1 + [R(X) int P Vt - int J Vt] / (2 i lambda)
//   q'(X) = R'(X) [int P Vt] / (2 i lambda) .
// Plane-wave references are the same formulas with J = 1, P = e^{2 i
// lambda t}, R = e^{-2 i lambda X}: the classic Jost integral equation.
TailCorrection born_tail(const SideView& side, double lambda, double X) {
  const bool bessel = side.tail.kind == TailKind::inverse_square;
  const double nu = side.tail.nu;
  const double c2 = bessel ? nu * nu - 0.25 : 0.0;
  const double pi = std::numbers::pi;

  double smooth = 0.0;
  cplx osc = 0.0;
  const double floor_ = 2.0 * lambda * 1e-15;
  double a = X;
  for (int panel = 0; panel < 72; ++panel) {
    const double b = 1.7 * a;
    const PanelRule rule = gauss16(a, b);
    std::vector<cplx> g(rule.x.size());
    double ds = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double t = rule.x[i];
      const double vt = side.v(t) - c2 / (t * t);
      if (bessel) {
        const cplx h = hankel1(nu, lambda * t);
        const double amp = 0.5 * pi * lambda * t;
        ds += rule.w[i] * vt * amp * std::norm(h);
        g[i] = vt * amp * h * h * std::polar(1.0, -2.0 * lambda * t);
      } else {
        ds += rule.w[i] * vt;
        g[i] = vt;
      }
    }
    const cplx dosc = filon_panel(rule, g, a, b, 2.0 * lambda);
    smooth += ds;
    osc += dosc;
    a = b;
    if (panel >= 1 && std::abs(ds) + std::abs(dosc) < floor_) break;
  }

  cplx R, Rp;
  if (bessel) {
    const cplx h = hankel1(nu, lambda * X);
    R = std::conj(h) / h;
    Rp = cplx(0.0, -4.0) / (pi * X * h * h);
  } else {
    R = std::polar(1.0, -2.0 * lambda * X);
    Rp = cplx(0.0, -2.0 * lambda) * R;
  }
  const cplx itl = 1.0 / cplx(0.0, 2.0 * lambda);
  return {1.0 + itl * (R * osc - smooth), itl * Rp * osc};
}

// Seed value of the Jost solution at mirrored coordinate xi, normalized to
// e^{i lambda xi}. Power-law tails get the Born correction for everything
// beyond xi; the other kinds rely on the seed scan alone.
OutgoingWave seed_wave(const SideView& side, double lambda, double xi) {
  switch (side.tail.kind) {
    case TailKind::zero:
    case TailKind::exponential: {
      const cplx e = std::polar(1.0, lambda * xi);
      return {e, cplx(0.0, lambda) * e};
    }
    case TailKind::inverse_square: {
      const auto u = outgoing_wave(side.tail.nu, lambda, xi);
      const auto c = born_tail(side, lambda, xi);
      return {u.value * c.q, u.derivative * c.q + u.value * c.qp};
    }
    case TailKind::inverse_cube: {
      const cplx e = std::polar(1.0, lambda * xi);
      const auto c = born_tail(side, lambda, xi);
      return {e * c.q, e * (cplx(0.0, lambda) * c.q + c.qp)};
    }
  }
  throw ValidationError("jost: unhandled tail kind");
}

// Born-type bound on the relative Jost error left after seeding at xi:
// for power-law tails, on the first-order correction made there; for the
// other kinds, on the bare reference wave itself.
double seed_residual(const SideView& side, double lambda, double xi) {
  const double born = std::min(1.0 / lambda, xi);
  switch (side.tail.kind) {
    case TailKind::zero: {
      if (side.v(xi) == 0.0 && side.v(1.37 * xi) == 0.0) return 0.0;
      return 1.0;  // not past the support edge yet
    }
    case TailKind::exponential:
      return std::abs(side.v(xi)) / side.tail.coefficient * born;
    case TailKind::inverse_square: {
      const double c2 = side.tail.nu * side.tail.nu - 0.25;
      const double d1 = std::abs(side.v(xi) - c2 / (xi * xi));
      const double xj = 1.37 * xi;
      const double d2 = std::abs(side.v(xj) - c2 / (xj * xj));
      if (d1 == 0.0 && d2 == 0.0) return 0.0;  // pure tail out here
      return (d1 + d2) * xi * born;
    }
    case TailKind::inverse_cube: {
      // the whole ~c3/t^3 tail is handed to the correction integral
      const double d1 = std::abs(side.v(xi)) * xi;
      const double xj = 1.37 * xi;
      const double d2 = std::abs(side.v(xj)) * xj;
      return 0.5 * (d1 + d2) * born;
    }
  }
  return std::numeric_limits<double>::infinity();
}

double choose_seed(const SideView& side, double lambda, double budget,
                   double need) {
  double xi = std::max(need, 60.0);
  // keep the correction kernel in the oscillatory Bessel regime
  if (side.tail.kind == TailKind::inverse_square)
    xi = std::max(xi, (30.0 + 2.0 * side.tail.nu) / lambda);
  else if (side.tail.kind == TailKind::inverse_cube)
    xi = std::max(xi, 30.0 / lambda);
  for (int i = 0; i < 90; ++i) {
    if (seed_residual(side, lambda, xi) <= budget) return xi;
    xi *= 1.6;
    if (xi > 1e12) break;
  }
  throw AccuracyError("jost: no seed point meets the tail budget");
}

// Descending checkpoint list from start through the requested points, with
// geometric via-points so that no accepted step can vault the interaction
// region unsampled.
std::vector<double> with_ladder(double start, const std::vector<double>& req) {
  std::vector<double> asc(req.rbegin(), req.rend());
  auto collides = [&](double t) {
    auto it = std::lower_bound(asc.begin(), asc.end(), t - 1e-9);
    return it != asc.end() && *it < t + 1e-9;
  };
  std::vector<double> via;  // built descending
  for (double t = start / 1.9; t > std::max(1.0, req.back()); t /= 1.9)
    if (t < start - 1e-9 && !collides(t)) via.push_back(t);
  // land exactly on +-1 so piecewise-defined models never hide a joint in
  // the interior of a step
  for (double t : {1.0, -1.0})
    if (t < start - 1e-9 && t > req.back() && !collides(t)) via.push_back(t);
  for (double t = -1.9; t > req.back(); t *= 1.9)
    if (!collides(t)) via.push_back(t);

  std::vector<double> all;
  all.reserve(1 + via.size() + req.size());
  all.push_back(start);
  std::merge(via.begin(), via.end(), req.begin(), req.end(),
             std::back_inserter(all), std::greater<double>());
  return all;
}

// g'' = -2 i lambda g' - (lambda^2 - V) ... with f = g e^{i lambda xi} the
// equation -f'' + V f = lambda^2 f becomes g'' + 2 i lambda g' = V g.
std::vector<OutgoingWave> integrate_side(const SideView& side, double lambda,
                                         const std::vector<double>& xi_desc,
                                         double xi_start, double rtol) {
  const auto seed = seed_wave(side, lambda, xi_start);
  const cplx unwind = std::polar(1.0, -lambda * xi_start);
  CState y{seed.value * unwind,
           (seed.derivative - cplx(0.0, lambda) * seed.value) * unwind};

  const std::vector<double> times = with_ladder(xi_start, xi_desc);
  std::vector<CState> states;
  states.reserve(times.size());
  auto stepper = ode::make_controlled(1e-280, rtol,
                                      ode::runge_kutta_fehlberg78<CState>());
  auto sys = [&](const CState& q, CState& dq, double xi) {
    dq[0] = q[1];
    dq[1] = -2.0 * cplx(0.0, lambda) * q[1] + side.v(xi) * q[0];
  };
  ode::integrate_times(stepper, sys, y, times.begin(), times.end(),
                       -std::min(0.5, 0.05 / lambda),
                       [&](const CState& q, double) { states.push_back(q); });

  std::vector<OutgoingWave> out;
  out.reserve(xi_desc.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (k < xi_desc.size() && times[i] == xi_desc[k]) {
      const double xi = times[i];
      const cplx e = std::polar(1.0, lambda * xi);
      const cplx val = states[i][0] * e;
      const cplx der = (states[i][1] + cplx(0.0, lambda) * states[i][0]) * e;
      out.push_back({val, static_cast<double>(side.s) * der});
      ++k;
    }
  }
  if (k != xi_desc.size())
    throw AccuracyError("jost: checkpoint collection out of sync");
  return out;
}

SideView make_side(const PotentialModel& m, const TailClass& left,
                   const TailClass& right, int side) {
  SideView sv;
  sv.s = side;
  sv.tail = side > 0 ? right : left;
  sv.model = &m;
  return sv;
}

const std::vector<double>& stations() {
  static const std::vector<double> s{-8.0, -3.0, 0.0, 3.0, 8.0};
  return s;
}

cplx cross(const OutgoingWave& f, const OutgoingWave& g) {
  return f.value * g.derivative - f.derivative * g.value;
}

}  // namespace

ScatteringProblem::ScatteringProblem(PotentialModel model, double rtol,
                                     double tail_budget)
    : model_(std::move(model)), rtol_(rtol), tail_budget_(tail_budget) {
  auto [l, r] = model_.tails();
  tail_left_ = l;
  tail_right_ = r;
  if (!(rtol_ > 0) || !(tail_budget_ > 0))
    throw ValidationError("ScatteringProblem: tolerances must be positive");
}

JostSamples ScatteringProblem::jost(int side, double lambda,
                                    std::vector<double> xs) const {
  if (side != 1 && side != -1)
    throw ValidationError("jost: side must be +1 or -1");
  if (!(lambda > 0)) throw ValidationError("jost: lambda must be positive");
  if (xs.empty()) throw ValidationError("jost: no evaluation points");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw ValidationError("jost: points must be strictly ascending");

  const SideView sv = make_side(model_, tail_left_, tail_right_, side);
  std::vector<double> xi(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    xi[i] = side > 0 ? xs[xs.size() - 1 - i] : -xs[i];

  const double need = 1.05 * std::max(xi.front(), 0.0) + 2.0;
  // with the first-order tail correction the leftover error is quadratic
  // in the scanned residual, so the scan only needs the square root
  const bool corrected = sv.tail.kind == TailKind::inverse_square ||
                         sv.tail.kind == TailKind::inverse_cube;
  const double budget = corrected ? std::sqrt(tail_budget_) : tail_budget_;
  const double start = choose_seed(sv, lambda, budget, need);
  auto waves = integrate_side(sv, lambda, xi, start, rtol_);

  JostSamples out;
  out.x = std::move(xs);
  out.seeded_at = start;
  out.f.resize(waves.size());
  for (std::size_t i = 0; i < waves.size(); ++i)
    out.f[i] = side > 0 ? waves[waves.size() - 1 - i] : waves[i];
  return out;
}

OutgoingWave ScatteringProblem::jost_at(int side, double lambda,
                                        double x) const {
  return jost(side, lambda, {x}).f.front();
}

WronskianValue ScatteringProblem::wronskian(double lambda) const {
  auto p = jost(+1, lambda, stations());
  auto m = jost(-1, lambda, stations());
  cplx mean = 0.0;
  std::vector<cplx> w(stations().size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = cross(p.f[i], m.f[i]);
    mean += w[i];
  }
  mean /= static_cast<double>(w.size());
  double spread = 0.0;
  for (const cplx& wi : w)
    spread = std::max(spread, std::abs(wi - mean));
  return {mean, spread / std::abs(mean)};
}

ScatteringCoefficients ScatteringProblem::coefficients(double lambda) const {
  auto p = jost(+1, lambda, stations());
  auto m = jost(-1, lambda, stations());
  cplx w = 0.0, wl = 0.0, wr = 0.0;
  for (std::size_t i = 0; i < stations().size(); ++i) {
    OutgoingWave pc{std::conj(p.f[i].value), std::conj(p.f[i].derivative)};
    OutgoingWave mc{std::conj(m.f[i].value), std::conj(m.f[i].derivative)};
    w += cross(p.f[i], m.f[i]);
    wl += cross(p.f[i], mc);  // f+ against conj f-
    wr += cross(m.f[i], pc);  // f- against conj f+
  }
  const double n = static_cast<double>(stations().size());
  w /= n;
  wl /= n;
  wr /= n;

  ScatteringCoefficients out;
  out.transmission = cplx(0.0, -2.0 * lambda) / w;
  out.reflection_left = -wl / w;
  out.reflection_right = wr / w;
  const double t2 = std::norm(out.transmission);
  out.unitarity_defect =
      std::max(std::abs(t2 + std::norm(out.reflection_left) - 1.0),
               std::abs(t2 + std::norm(out.reflection_right) - 1.0));
  return out;
}

std::vector<double> ScatteringProblem::spectral_kernel_row(
    double lambda, double x, const std::vector<double>& ys) const {
  std::vector<double> pts = ys;
  pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto p = jost(+1, lambda, pts);
  auto m = jost(-1, lambda, pts);
  const std::size_t ix =
      static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), x) -
                               pts.begin());
  const cplx w = cross(p.f[ix], m.f[ix]);

  std::vector<double> row;
  row.reserve(ys.size());
  for (double y : ys) {
    const std::size_t iy = static_cast<std::size_t>(
        std::lower_bound(pts.begin(), pts.end(), y) - pts.begin());
    const std::size_t hi = y > x ? iy : ix;
    const std::size_t lo = y > x ? ix : iy;
    row.push_back(2.0 * lambda / kPi *
                  std::imag(p.f[hi].value * m.f[lo].value / w));
  }
  return row;
}

double ScatteringProblem::spectral_kernel(double lambda, double x,
                                          double y) const {
  return spectral_kernel_row(lambda, x, {y}).front();
}

std::vector<double> ScatteringProblem::spectral_kernel_block(
    double lambda, const std::vector<double>& xs,
    const std::vector<double>& ys) const {
  std::vector<double> pts = xs;
  pts.insert(pts.end(), ys.begin(), ys.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto p = jost(+1, lambda, pts);
  auto m = jost(-1, lambda, pts);
  cplx w = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) w += cross(p.f[i], m.f[i]);
  w /= static_cast<double>(pts.size());

  auto index = [&](double v) {
    return static_cast<std::size_t>(
        std::lower_bound(pts.begin(), pts.end(), v) - pts.begin());
  };
  std::vector<std::size_t> jx(xs.size()), jy(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) jx[i] = index(xs[i]);
  for (std::size_t j = 0; j < ys.size(); ++j) jy[j] = index(ys[j]);

  std::vector<double> block(xs.size() * ys.size());
  const double scale = 2.0 * lambda / kPi;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const std::size_t hi = std::max(jx[i], jy[j]);
      const std::size_t lo = std::min(jx[i], jy[j]);
      block[i * ys.size() + j] =
          scale * std::imag(p.f[hi].value * m.f[lo].value / w);
    }
  return block;
}

namespace {

// subordinate branch of u'' = V u at the far point xi of one side
RState zero_energy_seed(const SideView& side, double xi) {
  switch (side.tail.kind) {
    case TailKind::zero:
    case TailKind::exponential:
      return {1.0, 0.0};
    case TailKind::inverse_square: {
      const double nu = side.tail.nu;
      return {std::pow(xi, 0.5 - nu), (0.5 - nu) * std::pow(xi, -0.5 - nu)};
    }
    case TailKind::inverse_cube: {
      const double c3 = side.tail.coefficient;
      return {1.0 + 0.5 * c3 / xi, -0.5 * c3 / (xi * xi)};
    }
  }
  throw ValidationError("zero_energy_seed: unhandled tail kind");
}

double zero_energy_residual(const SideView& side, double xi) {
  switch (side.tail.kind) {
    case TailKind::zero:
      return (side.v(xi) == 0.0 && side.v(1.37 * xi) == 0.0) ? 0.0 : 1.0;
    case TailKind::exponential:
      return std::abs(side.v(xi)) * xi / side.tail.coefficient;
    case TailKind::inverse_square: {
      const double c2 = side.tail.nu * side.tail.nu - 0.25;
      const double d1 = std::abs(side.v(xi) - c2 / (xi * xi));
      const double xj = 1.37 * xi;
      const double d2 = std::abs(side.v(xj) - c2 / (xj * xj));
      if (d1 == 0.0 && d2 == 0.0) return 0.0;
      return (d1 + d2) * xi * xi;
    }
    case TailKind::inverse_cube: {
      const double c3 = side.tail.coefficient;
      const double d = std::abs(side.v(xi) - c3 / (xi * xi * xi));
      return d * xi * xi + 0.25 * c3 * c3 / (xi * xi);
    }
  }
  return std::numeric_limits<double>::infinity();
}

RState propagate_zero_energy(const SideView& side, double budget) {
  if (side.tail.kind == TailKind::inverse_square && side.tail.nu < 0.05)
    throw ValidationError(
        "detect_zero_resonance: inverse-square tail with nu ~ 0 is "
        "logarithmically degenerate");
  double xi = 60.0;
  for (int i = 0; i < 120; ++i) {
    if (zero_energy_residual(side, xi) <= budget) break;
    xi *= 1.7;
    if (xi > 5e13)
      throw AccuracyError("detect_zero_resonance: tail refuses to settle");
  }

  RState y = zero_energy_seed(side, xi);
  std::vector<double> times{xi};
  for (double t = xi / 1.9; t > 1.0; t /= 1.9) times.push_back(t);
  times.push_back(0.0);
  auto stepper = ode::make_controlled(1e-280, 1e-12,
                                      ode::runge_kutta_fehlberg78<RState>());
  auto sys = [&](const RState& q, RState& dq, double t) {
    dq[0] = q[1];
    dq[1] = side.v(t) * q[0];
  };
  ode::integrate_times(stepper, sys, y, times.begin(), times.end(), -0.1,
                       [](const RState&, double) {});
  return y;  // (u, du/dxi) at xi = 0
}

}  // namespace

ResonanceReport detect_zero_resonance(const PotentialModel& model,
                                      double threshold) {
  auto [l, r] = model.tails();
  const SideView left = make_side(model, l, r, -1);
  const SideView right = make_side(model, l, r, +1);
  const RState ul = propagate_zero_energy(left, 1e-10);
  const RState ur = propagate_zero_energy(right, 1e-10);

  // d/dx = -d/dxi on the left, so W(fL, fR) at x = 0 picks up a sign
  const double w = ul[0] * ur[1] + ul[1] * ur[0];
  const double scale = std::sqrt((ul[0] * ul[0] + ul[1] * ul[1]) *
                                 (ur[0] * ur[0] + ur[1] * ur[1]));
  ResonanceReport rep;
  rep.normalized_wronskian = std::abs(w) / scale;
  rep.threshold = threshold;
  rep.resonant = rep.normalized_wronskian < threshold;
  return rep;
}

PowerFit wronskian_small_lambda(const ScatteringProblem& problem, double lo,
                                double hi, int count) {
  if (!(lo > 0) || !(hi > lo))
    throw ValidationError("wronskian_small_lambda: need 0 < lo < hi");
  if (count < 4)
    throw ValidationError("wronskian_small_lambda: need at least 4 points");

  auto [l, r] = problem.model().tails();
  if (l.kind == TailKind::inverse_square ||
      r.kind == TailKind::inverse_square) {
    if (detect_zero_resonance(problem.model()).resonant)
      throw ValidationError(
          "wronskian_small_lambda: zero-energy resonance with an "
          "inverse-square tail; the generic power law does not apply");
  }

  PowerFit fit;
  std::vector<double> lx, ly;
  for (int i = 0; i < count; ++i) {
    const double lam =
        lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    const double mag = std::abs(problem.wronskian(lam).value);
    fit.lambda.push_back(lam);
    fit.magnitude.push_back(mag);
    lx.push_back(std::log(lam));
    ly.push_back(std::log(mag));
  }
  const LineFit line = fit_line(lx, ly);
  fit.exponent = line.slope;
  fit.r2 = line.r2;
  return fit;
}

}  // namespace wavelab
