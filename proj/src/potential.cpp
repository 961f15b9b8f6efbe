#include "wavelab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wavelab/numerics.hpp"

namespace wavelab {

const char* to_string(TailKind k) {
  switch (k) {
    case TailKind::zero: return "zero";
    case TailKind::exponential: return "exponential";
    case TailKind::inverse_square: return "inverse_square";
    case TailKind::inverse_cube: return "inverse_cube";
  }
  return "?";
}

TortoiseMap::TortoiseMap(double mass) : mass_(mass) {
  if (!(mass > 0)) throw ValidationError("TortoiseMap: mass must be positive");
}

double TortoiseMap::coordinate(double r) const {
  const double m2 = 2.0 * mass_;
  if (!(r > m2)) throw ValidationError("TortoiseMap: r must exceed 2M");
  return r + m2 * std::log(r / m2 - 1.0);
}

double TortoiseMap::radius(double x) const {
  return 2.0 * mass_ * (1.0 + radius_excess(x));
}

double TortoiseMap::radius_excess(double x) const {
  const double m2 = 2.0 * mass_;
  const double xi = (x - m2) / m2;
  if (xi <= -8.0) {
    // u e^u = e^xi with u tiny: the fixed point u <- e^(xi - u) contracts
    // with factor u per pass.
    const double y = std::max(xi, -700.0);
    double u = std::exp(y);
    for (int i = 0; i < 4; ++i) u = std::exp(y - u);
    return u;
  }

  // phi(r) = r + 2M log(r/2M - 1) - x is strictly increasing on (2M, inf).
  const auto phi = [&](double r) { return r + m2 * std::log(r / m2 - 1.0) - x; };

  // Bracket. phi(max(4M, x)) >= 0 always; walk the lower end toward 2M
  // until the sign flips.
  double hi = std::max(2.0 * m2, x);
  double u_lo = std::min(0.25, std::exp(xi));
  double lo = m2 * (1.0 + u_lo);
  for (int i = 0; i < 100 && phi(lo) > 0; ++i) {
    u_lo *= 0.5;
    lo = m2 * (1.0 + u_lo);
  }

  // Seed: r ~ 2M + 2M e^xi deep inside, r ~ x far out.
  double r = (x >= 2.0 * m2) ? x : m2 * (1.0 + std::exp(xi));
  r = std::min(std::max(r, lo), hi);

  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  for (int it = 0; it < 100; ++it) {
    const double f = phi(r);
    if (std::abs(f) <= tol) return r / m2 - 1.0;
    if (f > 0) hi = r; else lo = r;
    const double slope = r / (r - m2);
    double next = r - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    r = next;
  }
  throw AccuracyError("TortoiseMap: Newton failed to meet tolerance");
}

namespace {

double eval_regge_wheeler(const ReggeWheelerPotential& p, double x) {
  if (p.ell == 0 && p.sigma == 0) return 0.0;
  const double m2 = 2.0 * p.mass;
  const double u = TortoiseMap(p.mass).radius_excess(x);
  const double w = 1.0 + u;  // r / 2M
  const double ll1 = static_cast<double>(p.ell) * (p.ell + 1);
  return (u / w) * (ll1 + p.sigma / w) / (m2 * m2 * w * w);
}

double eval_inverse_square_model(const InverseSquareModelPotential& p,
                                 double x) {
  const double v = p.a * p.a - 0.25;
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return v / (x * x);
  // quintic bridge: (1+x)^3 q(x) meets 0 with two flat derivatives at -1
  // and v, -2v, 6v at +1
  const double s = x - 1.0;
  const double q = 0.125 - (7.0 / 16.0) * s + (15.0 / 16.0) * s * s;
  const double c = 1.0 + x;
  return v * c * c * c * q;
}

double eval_surface_of_revolution(const SurfaceOfRevolutionPotential& p,
                                  double x) {
  // radius of the surface as a function of arclength: rho = sqrt(c^2+x^2/2);
  // the half-integer curvature terms come from conjugating by rho^(1/2)
  const double c2 = p.neck * p.neck;
  const double rho2 = c2 + 0.5 * x * x;
  const double ell2 = static_cast<double>(p.ell) * p.ell;
  return ell2 / rho2 - x * x / (16.0 * rho2 * rho2) + c2 / (4.0 * rho2 * rho2);
}

double spline_eval(const TabulatedPotential& t, double x) {
  const auto& xs = t.x;
  const auto& vs = t.v;
  if (x <= xs.front()) {
    const double v0 = vs.front();
    if (v0 <= 0.0) return 0.0;
    return v0 * std::pow(xs.front() / x, t.p_left);
  }
  if (x >= xs.back()) {
    const double v1 = vs.back();
    if (v1 <= 0.0) return 0.0;
    return v1 * std::pow(xs.back() / x, t.p_right);
  }
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double h = xs[j + 1] - xs[j];
  const double A = (xs[j + 1] - x) / h, B = (x - xs[j]) / h;
  return A * vs[j] + B * vs[j + 1] +
         ((A * A * A - A) * t.spline_d2[j] +
          (B * B * B - B) * t.spline_d2[j + 1]) *
             h * h / 6.0;
}

struct TailSideEval {
  // log-log slope of V over the outer quarter of the grid on one side
  bool ok = false;
  TailClass cls;
  double p = 0.0;
};

TailSideEval classify_tabulated_side(const std::vector<double>& x,
                                     const std::vector<double>& v,
                                     bool right) {
  TailSideEval out;
  std::vector<double> lx, lv, ax;
  const double edge = std::abs(right ? x.back() : x.front());
  if (edge < 20.0) return out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xx = right ? x[i] : -x[i];
    if (xx >= std::max(10.0, edge / 4.0)) {
      ax.push_back(xx);
      if (v[i] > 0) {
        lx.push_back(std::log(xx));
        lv.push_back(std::log(v[i]));
      }
    }
  }
  if (ax.size() < 6) return out;
  bool all_tiny = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xx = right ? x[i] : -x[i];
    if (xx >= std::max(10.0, edge / 4.0) && std::abs(v[i]) > 1e-13)
      all_tiny = false;
  }
  if (all_tiny) {
    out.ok = true;
    out.cls = TailClass{TailKind::zero, 0.5, 0.0};
    return out;
  }
  if (lx.size() < 6) return out;
  const LineFit fit = fit_line(lx, lv);
  out.p = -fit.slope;
  const double c_end = std::exp(fit.intercept);  // V ~ c_end x^-p
  if (std::abs(out.p - 2.0) <= 0.35 && fit.r2 > 0.98) {
    const double coeff = c_end;
    out.ok = true;
    out.cls = TailClass{TailKind::inverse_square,
                        std::sqrt(std::max(coeff + 0.25, 0.0)), coeff};
    return out;
  }
  if (std::abs(out.p - 3.0) <= 0.35 && fit.r2 > 0.98) {
    out.ok = true;
    out.cls = TailClass{TailKind::inverse_cube, 0.5, c_end};
    return out;
  }
  // exponential: log V linear in x itself
  std::vector<double> axp;
  for (double xx : ax) axp.push_back(xx);
  if (lv.size() == axp.size()) {
    const LineFit efit = fit_line(axp, lv);
    if (efit.r2 > 0.995 && efit.slope < -0.05) {
      out.ok = true;
      out.cls = TailClass{TailKind::exponential, 0.5, -efit.slope};
      return out;
    }
  }
  return out;
}

}  // namespace

PotentialModel::PotentialModel(Rep rep)
    : rep_(std::make_shared<const Rep>(std::move(rep))) {}

PotentialModel PotentialModel::free_line() { return PotentialModel(FreePotential{}); }

PotentialModel PotentialModel::regge_wheeler(double mass, int ell, int sigma) {
  if (!(mass > 0)) throw ValidationError("regge_wheeler: mass must be positive");
  if (ell < 0) throw ValidationError("regge_wheeler: ell must be nonnegative");
  return PotentialModel(ReggeWheelerPotential{mass, ell, sigma});
}

PotentialModel PotentialModel::inverse_square_model(double a) {
  if (!(a > 0.5))
    throw ValidationError("inverse_square_model: need a > 1/2 for a decaying tail order");
  return PotentialModel(InverseSquareModelPotential{a});
}

PotentialModel PotentialModel::surface_of_revolution(int ell, double neck) {
  if (ell < 0) throw ValidationError("surface_of_revolution: ell must be nonnegative");
  if (!(neck > 0)) throw ValidationError("surface_of_revolution: neck must be positive");
  return PotentialModel(SurfaceOfRevolutionPotential{ell, neck});
}

PotentialModel PotentialModel::inverse_square_peak(double strength) {
  if (!(strength > 0)) throw ValidationError("inverse_square_peak: strength must be positive");
  return PotentialModel(InverseSquarePeakPotential{strength});
}

PotentialModel PotentialModel::tabulated(std::vector<double> x,
                                         std::vector<double> v) {
  if (x.size() != v.size() || x.size() < 4)
    throw ValidationError("tabulated: need four or more samples");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw ValidationError("tabulated: abscissae must be strictly increasing");

  TabulatedPotential t;
  t.x = std::move(x);
  t.v = std::move(v);

  // natural cubic spline second derivatives (tridiagonal sweep)
  const std::size_t n = t.x.size();
  t.spline_d2.assign(n, 0.0);
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double sig = (t.x[i] - t.x[i - 1]) / (t.x[i + 1] - t.x[i - 1]);
    const double p = sig * t.spline_d2[i - 1] + 2.0;
    t.spline_d2[i] = (sig - 1.0) / p;
    const double d = (t.v[i + 1] - t.v[i]) / (t.x[i + 1] - t.x[i]) -
                     (t.v[i] - t.v[i - 1]) / (t.x[i] - t.x[i - 1]);
    u[i] = (6.0 * d / (t.x[i + 1] - t.x[i - 1]) - sig * u[i - 1]) / p;
  }
  for (std::size_t k = n - 1; k-- > 1;)
    t.spline_d2[k] = t.spline_d2[k] * t.spline_d2[k + 1] + u[k];

  const TailSideEval left =
      classify_tabulated_side(t.x, t.v, /*right=*/false);
  const TailSideEval right =
      classify_tabulated_side(t.x, t.v, /*right=*/true);
  t.p_left = std::clamp(left.ok ? left.p : 2.0, 0.5, 8.0);
  t.p_right = std::clamp(right.ok ? right.p : 2.0, 0.5, 8.0);
  t.tails_classified = left.ok && right.ok;
  if (t.tails_classified) {
    t.tail_left = left.cls;
    t.tail_right = right.cls;
  }
  return PotentialModel(std::move(t));
}

PotentialModel PotentialModel::scaled_corrected(const PotentialModel& base,
                                                double factor, double iso) {
  if (!(factor > 0)) throw ValidationError("scaled_corrected: factor must be positive");
  ScaledCorrectedPotential s;
  s.base = std::make_shared<const PotentialModel>(base);
  s.factor = factor;
  s.iso = iso;
  return PotentialModel(std::move(s));
}

double PotentialModel::operator()(double x) const {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FreePotential>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ReggeWheelerPotential>) {
          return eval_regge_wheeler(p, x);
        } else if constexpr (std::is_same_v<T, InverseSquareModelPotential>) {
          return eval_inverse_square_model(p, x);
        } else if constexpr (std::is_same_v<T, SurfaceOfRevolutionPotential>) {
          return eval_surface_of_revolution(p, x);
        } else if constexpr (std::is_same_v<T, InverseSquarePeakPotential>) {
          return p.strength / (1.0 + x * x);
        } else if constexpr (std::is_same_v<T, TabulatedPotential>) {
          return spline_eval(p, x);
        } else {
          return p.factor * ((*p.base)(x) + p.iso / (1.0 + x * x));
        }
      },
      *rep_);
}

std::pair<TailClass, TailClass> PotentialModel::tails() const {
  return std::visit(
      [&](const auto& p) -> std::pair<TailClass, TailClass> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FreePotential>) {
          return {TailClass{TailKind::zero, 0.5, 0.0},
                  TailClass{TailKind::zero, 0.5, 0.0}};
        } else if constexpr (std::is_same_v<T, ReggeWheelerPotential>) {
          if (p.ell == 0 && p.sigma == 0)
            return {TailClass{TailKind::zero, 0.5, 0.0},
                    TailClass{TailKind::zero, 0.5, 0.0}};
          TailClass left{TailKind::exponential, 0.5, 1.0 / (2.0 * p.mass)};
          if (p.ell >= 1) {
            const double c = static_cast<double>(p.ell) * (p.ell + 1);
            return {left, TailClass{TailKind::inverse_square, p.ell + 0.5, c}};
          }
          return {left,
                  TailClass{TailKind::inverse_cube, 0.5, 2.0 * p.mass * p.sigma}};
        } else if constexpr (std::is_same_v<T, InverseSquareModelPotential>) {
          return {TailClass{TailKind::zero, 0.5, 0.0},
                  TailClass{TailKind::inverse_square, p.a, p.a * p.a - 0.25}};
        } else if constexpr (std::is_same_v<T, SurfaceOfRevolutionPotential>) {
          const double coeff = 2.0 * p.ell * p.ell - 0.25;
          const double nu = std::sqrt(2.0) * p.ell;
          TailClass t{TailKind::inverse_square, nu, coeff};
          return {t, t};
        } else if constexpr (std::is_same_v<T, InverseSquarePeakPotential>) {
          TailClass t{TailKind::inverse_square, std::sqrt(p.strength + 0.25),
                      p.strength};
          return {t, t};
        } else if constexpr (std::is_same_v<T, TabulatedPotential>) {
          if (!p.tails_classified)
            throw ValidationError(
                "classify_tails: tabulated grid lacks far-field samples "
                "(need |x| >= 20 with a clean power, exponential, or zero tail)");
          return {p.tail_left, p.tail_right};
        } else {
          auto [l, r] = p.base->tails();
          auto lift = [&](TailClass c) -> TailClass {
            const bool has_iso = p.iso != 0.0;
            switch (c.kind) {
              case TailKind::inverse_square: {
                const double coeff = p.factor * (c.coefficient + p.iso);
                return TailClass{TailKind::inverse_square,
                                 std::sqrt(std::max(coeff + 0.25, 0.0)), coeff};
              }
              case TailKind::zero:
              case TailKind::exponential:
                if (has_iso) {
                  const double coeff = p.factor * p.iso;
                  return TailClass{TailKind::inverse_square,
                                   std::sqrt(std::max(coeff + 0.25, 0.0)),
                                   coeff};
                }
                if (c.kind == TailKind::exponential) return c;
                return c;
              case TailKind::inverse_cube:
                if (has_iso) {
                  const double coeff = p.factor * p.iso;
                  return TailClass{TailKind::inverse_square,
                                   std::sqrt(std::max(coeff + 0.25, 0.0)),
                                   coeff};
                }
                return TailClass{TailKind::inverse_cube, 0.5,
                                 p.factor * c.coefficient};
            }
            return c;
          };
          return {lift(l), lift(r)};
        }
      },
      *rep_);
}

std::string PotentialModel::name() const {
  char buf[128];
  return std::visit(
      [&](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FreePotential>) {
          return "free";
        } else if constexpr (std::is_same_v<T, ReggeWheelerPotential>) {
          std::snprintf(buf, sizeof buf, "rw_M%g_l%d_s%d", p.mass, p.ell,
                        p.sigma);
          return buf;
        } else if constexpr (std::is_same_v<T, InverseSquareModelPotential>) {
          std::snprintf(buf, sizeof buf, "ism_a%g", p.a);
          return buf;
        } else if constexpr (std::is_same_v<T, SurfaceOfRevolutionPotential>) {
          std::snprintf(buf, sizeof buf, "sor_l%d_c%g", p.ell, p.neck);
          return buf;
        } else if constexpr (std::is_same_v<T, InverseSquarePeakPotential>) {
          std::snprintf(buf, sizeof buf, "peak_s%g", p.strength);
          return buf;
        } else if constexpr (std::is_same_v<T, TabulatedPotential>) {
          std::snprintf(buf, sizeof buf, "tab_n%zu", p.x.size());
          return buf;
        } else {
          std::snprintf(buf, sizeof buf, "scaled_f%g_i%g_", p.factor, p.iso);
          return buf + p.base->name();
        }
      },
      *rep_);
}

double evaluate_potential(const PotentialModel& m, double x) { return m(x); }

std::pair<TailClass, TailClass> classify_tails(const PotentialModel& m) {
  return m.tails();
}

}  // namespace wavelab
