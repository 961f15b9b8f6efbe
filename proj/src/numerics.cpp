#include "wavelab/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace wavelab {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("fit_line: need two or more paired samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det <= 0) throw ValidationError("fit_line: degenerate abscissae");
  LineFit out;
  out.slope = (n * sxy - sx * sy) / det;
  out.intercept = (sy - out.slope * sx) / n;
  out.n = x.size();
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (out.slope * x[i] + out.intercept);
    ss_res += r * r;
  }
  out.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

PanelRule gauss16(double a, double b) {
  using rule = boost::math::quadrature::gauss<double, 16>;
  PanelRule out;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  // boost stores only the nonnegative abscissae of the symmetric rule
  for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
    const double t = rule::abscissa()[i];
    const double w = rule::weights()[i] * half;
    if (t == 0.0) {
      out.x.push_back(mid);
      out.w.push_back(w);
    } else {
      out.x.push_back(mid - half * t);
      out.w.push_back(w);
      out.x.push_back(mid + half * t);
      out.w.push_back(w);
    }
  }
  return out;
}

KronrodRule kronrod15(double a, double b) {
  using kr = boost::math::quadrature::gauss_kronrod<double, 15>;
  using g7 = boost::math::quadrature::gauss<double, 7>;
  KronrodRule out;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  // Kronrod abscissae: even indices are the embedded Gauss-7 nodes.
  for (std::size_t i = 0; i < kr::abscissa().size(); ++i) {
    const double t = kr::abscissa()[i];
    const double wk = kr::weights()[i] * half;
    const double wg =
        (i % 2 == 0) ? g7::weights()[i / 2] * half : 0.0;
    if (t == 0.0) {
      out.x.push_back(mid);
      out.w_kronrod.push_back(wk);
      out.w_gauss.push_back(wg);
    } else {
      out.x.push_back(mid - half * t);
      out.w_kronrod.push_back(wk);
      out.w_gauss.push_back(wg);
      out.x.push_back(mid + half * t);
      out.w_kronrod.push_back(wk);
      out.w_gauss.push_back(wg);
    }
  }
  return out;
}

double integrate_gauss(const std::function<double(double)>& f, double a,
                       double b, int panels) {
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + (b - a) * p / panels;
    const double pb = a + (b - a) * (p + 1) / panels;
    const PanelRule r = gauss16(pa, pb);
    for (std::size_t i = 0; i < r.x.size(); ++i) total += r.w[i] * f(r.x[i]);
  }
  return total;
}

double smooth_step_down(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (s * s));
  const double b = std::exp(-1.0 / ((1.0 - s) * (1.0 - s)));
  return b / (a + b);
}

double solve_bracketed(const std::function<double(double)>& f, double a,
                       double b, double tol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0))
    throw ValidationError("solve_bracketed: endpoints do not bracket a root");
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    // secant proposal, clamped into the bracket interior
    double m = (std::abs(fb - fa) > 0)
                   ? (a - fa * (b - a) / (fb - fa))
                   : 0.5 * (a + b);
    const double lo = a + 0.1 * (b - a), hi = b - 0.1 * (b - a);
    if (!(m > lo && m < hi)) m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace wavelab
