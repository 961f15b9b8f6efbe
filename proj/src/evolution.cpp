#include "wavelab/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "wavelab/numerics.hpp"
#include "wavelab/scattering.hpp"

namespace wavelab {

namespace {

constexpr double kPhaseBudget = 4.0;  // radians per quadrature panel
constexpr double kLambdaFloor = 3e-4;
constexpr double kCutoffStart = 0.85;  // fraction of bandwidth where the
                                       // smooth cutoff begins

// Worst-case phase of F_t(lambda) * kernel across the grid. The kernel
// oscillates in lambda at rate |x - y| <= reach.
double plan_phase(Propagator p, double t, double reach, double lambda) {
  if (p == Propagator::schrodinger)
    return t * lambda * lambda + reach * lambda;
  return (t + reach) * lambda;
}

double invert_phase(Propagator p, double t, double reach, double phi) {
  if (p == Propagator::schrodinger && t > 0.0) {
    return (std::sqrt(reach * reach + 4.0 * t * phi) - reach) / (2.0 * t);
  }
  const double rate = (p == Propagator::schrodinger) ? reach : t + reach;
  return phi / rate;
}

cplx propagator_factor(Propagator p, double t, double lambda) {
  switch (p) {
    case Propagator::cosine:
      return std::cos(t * lambda);
    case Propagator::sinc:
      return t == 0.0 ? 0.0 : std::sin(t * lambda) / lambda;
    case Propagator::schrodinger:
      return std::polar(1.0, t * lambda * lambda);
  }
  return 0.0;
}

// Upper bound for |F_t| over [lo, hi], t <= t_max.
double propagator_bound(Propagator p, double t_max, double lo) {
  if (p != Propagator::sinc) return 1.0;
  return lo > 0.0 ? std::min(t_max, 1.0 / lo) : t_max;
}

struct YQuadrature {
  std::vector<double> y;
  std::vector<double> wg;  // quadrature weight times g(y)
};

// Fixed spatial rule integrating the kernel against the data. The kernel
// oscillates in y no faster than the bandwidth and has a derivative kink
// at each station, so stations inside a support become panel edges.
YQuadrature build_y_quadrature(const std::vector<SourceData>& data,
                               const std::vector<double>& stations,
                               double lambda_max) {
  YQuadrature out;
  for (const SourceData& g : data) {
    const double radius = g.support_radius();
    const double lo = g.center - radius;
    const double hi = g.center + radius;
    const int base =
        std::max(2, int(std::ceil(2.0 * radius * lambda_max / kPhaseBudget)));
    std::vector<double> edges;
    edges.reserve(base + 1 + stations.size());
    for (int k = 0; k <= base; ++k)
      edges.push_back(lo + 2.0 * radius * k / base);
    for (double x : stations)
      if (x > lo && x < hi) edges.push_back(x);
    std::sort(edges.begin(), edges.end());
    const double tiny = 1e-9 * radius;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      if (edges[k + 1] - edges[k] < tiny) continue;
      const PanelRule rule = gauss16(edges[k], edges[k + 1]);
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        out.y.push_back(rule.x[i]);
        out.wg.push_back(rule.w[i] * g(rule.x[i]));
      }
    }
  }
  return out;
}

struct Panel {
  double a = 0.0;
  double b = 0.0;
  KronrodRule rule;
  // kernel integrated against the data, cutoff applied: G[m * nx + i]
  std::vector<double> g;
};

struct StripFit {
  bool power = false;     // power law A lambda^p versus quadratic fallback
  double sign = 1.0;
  double amp = 0.0;       // A of the power law
  double exponent = 0.0;  // p
  std::array<double, 3> sample_lambda{};
  std::array<double, 3> sample_value{};
  double residual = 0.0;  // worst relative misfit at the samples
  bool negligible = false;
};

StripFit fit_strip(const std::array<double, 3>& lam,
                   const std::array<double, 3>& val) {
  StripFit fit;
  fit.sample_lambda = lam;
  fit.sample_value = val;
  const double amax =
      std::max({std::abs(val[0]), std::abs(val[1]), std::abs(val[2])});
  if (amax < 1e-280) {
    fit.negligible = true;
    return fit;
  }
  const bool same_sign = (val[0] > 0) == (val[1] > 0) &&
                         (val[1] > 0) == (val[2] > 0) &&
                         std::abs(val[0]) > 1e-6 * amax;
  if (same_sign) {
    std::vector<double> lx(3), ly(3);
    for (int m = 0; m < 3; ++m) {
      lx[m] = std::log(lam[m]);
      ly[m] = std::log(std::abs(val[m]));
    }
    const LineFit line = fit_line(lx, ly);
    if (line.slope > -0.2 && line.slope < 60.0) {
      fit.power = true;
      fit.sign = val[0] > 0 ? 1.0 : -1.0;
      fit.amp = std::exp(line.intercept);
      fit.exponent = line.slope;
      for (int m = 0; m < 3; ++m) {
        const double pred = fit.amp * std::pow(lam[m], fit.exponent);
        fit.residual = std::max(
            fit.residual, std::abs(pred - std::abs(val[m])) / std::abs(val[m]));
      }
      return fit;
    }
  }
  // quadratic through the three samples; extrapolation toward zero is mild
  // because the samples sit within a factor 2.25 of the floor
  fit.residual = 0.25;
  return fit;
}

double strip_value(const StripFit& fit, double lambda) {
  if (fit.negligible) return 0.0;
  if (fit.power) return fit.sign * fit.amp * std::pow(lambda, fit.exponent);
  const auto& l = fit.sample_lambda;
  const auto& v = fit.sample_value;
  const double a0 = (lambda - l[1]) * (lambda - l[2]) /
                    ((l[0] - l[1]) * (l[0] - l[2]));
  const double a1 = (lambda - l[0]) * (lambda - l[2]) /
                    ((l[1] - l[0]) * (l[1] - l[2]));
  const double a2 = (lambda - l[0]) * (lambda - l[1]) /
                    ((l[2] - l[0]) * (l[2] - l[1]));
  return a0 * v[0] + a1 * v[1] + a2 * v[2];
}

std::string describe(const QuadratureDiagnostics& d) {
  std::ostringstream os;
  os << "rule " << d.rule_error << ", strip " << d.strip_error << ", tail "
     << d.tail_estimate << ", depth " << d.refinement_depth;
  return os.str();
}

}  // namespace

const char* to_string(Propagator p) {
  switch (p) {
    case Propagator::cosine:
      return "cosine";
    case Propagator::sinc:
      return "sinc";
    case Propagator::schrodinger:
      return "schrodinger";
  }
  return "?";
}

const char* to_string(SourceProfile p) {
  switch (p) {
    case SourceProfile::gaussian_bump:
      return "gaussian_bump";
    case SourceProfile::mean_zero_doublet:
      return "mean_zero_doublet";
    case SourceProfile::compact_bump:
      return "compact_bump";
  }
  return "?";
}

double SourceData::operator()(double x) const {
  const double u = (x - center) / width;
  switch (profile) {
    case SourceProfile::gaussian_bump:
      return amplitude * std::exp(-0.5 * u * u);
    case SourceProfile::mean_zero_doublet:
      return -amplitude * u * std::exp(-0.5 * u * u);
    case SourceProfile::compact_bump: {
      const double s = 1.0 - u * u;
      if (s <= 0.0) return 0.0;
      return amplitude * std::exp(1.0 - 1.0 / s);
    }
  }
  return 0.0;
}

double SourceData::support_radius() const {
  return profile == SourceProfile::compact_bump ? width : 8.0 * width;
}

double SourceData::bandwidth() const {
  switch (profile) {
    case SourceProfile::gaussian_bump:
      return 12.0 / width;
    case SourceProfile::mean_zero_doublet:
      return 13.0 / width;
    case SourceProfile::compact_bump:
      // the transform of the compact bump only decays like exp(-sqrt(w l))
      return 200.0 / width;
  }
  return 0.0;
}

double SourceData::mean() const {
  switch (profile) {
    case SourceProfile::gaussian_bump:
      return amplitude * width * std::sqrt(2.0 * kPi);
    case SourceProfile::mean_zero_doublet:
      return 0.0;
    case SourceProfile::compact_bump:
      return amplitude * width *
             integrate_gauss(
                 [](double u) { return std::exp(1.0 - 1.0 / (1.0 - u * u)); },
                 -1.0, 1.0, 16);
  }
  return 0.0;
}

QuadraturePlan energy_split(double t, double lambda_max, double reach,
                            Propagator propagator) {
  if (!(t >= 0.0)) throw ValidationError("energy_split: t must be >= 0");
  if (!(lambda_max > 0.0))
    throw ValidationError("energy_split: lambda_max must be positive");
  if (!(reach >= 0.0))
    throw ValidationError("energy_split: reach must be >= 0");

  QuadraturePlan plan;
  plan.lambda_floor = std::min(kLambdaFloor, 0.125 * lambda_max);
  const double phi_lo = plan_phase(propagator, t, reach, plan.lambda_floor);
  const double phi_hi = plan_phase(propagator, t, reach, lambda_max);
  const std::size_t panels = std::max<std::size_t>(
      1, std::size_t(std::ceil((phi_hi - phi_lo) / kPhaseBudget)));
  plan.edges.resize(panels + 1);
  plan.edges.front() = plan.lambda_floor;
  plan.edges.back() = lambda_max;
  for (std::size_t k = 1; k < panels; ++k) {
    const double phi = phi_lo + (phi_hi - phi_lo) * double(k) / double(panels);
    plan.edges[k] = invert_phase(propagator, t, reach, phi);
  }
  // a 15-point rule resolves a phase-budgeted panel to near machine
  // precision; the bound is for a unit-amplitude integrand
  plan.error_bound = 1e-15 * (lambda_max - plan.lambda_floor);
  return plan;
}

WaveField evolve(const PotentialModel& model, Propagator propagator,
                 const SourceData& data, const std::vector<double>& times,
                 const std::vector<double>& stations,
                 const EvolveOptions& opts) {
  return evolve(model, propagator, std::vector<SourceData>{data}, times,
                stations, opts);
}

WaveField evolve(const PotentialModel& model, Propagator propagator,
                 const std::vector<SourceData>& data,
                 const std::vector<double>& times,
                 const std::vector<double>& stations,
                 const EvolveOptions& opts) {
  if (data.empty()) throw ValidationError("evolve: no sources");
  for (const SourceData& g : data) {
    if (!(g.width > 0.0) || !std::isfinite(g.width) ||
        !std::isfinite(g.amplitude) || !std::isfinite(g.center))
      throw ValidationError("evolve: malformed source");
  }
  if (times.empty()) throw ValidationError("evolve: no times");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw ValidationError("evolve: times must be finite and >= 0");
  if (stations.empty()) throw ValidationError("evolve: no stations");
  for (double x : stations)
    if (!std::isfinite(x)) throw ValidationError("evolve: bad station");
  if (!(opts.abs_tol > 0.0))
    throw ValidationError("evolve: abs_tol must be positive");

  const std::size_t nt = times.size();
  const std::size_t nx = stations.size();
  const double t_max = *std::max_element(times.begin(), times.end());

  double lambda_max = 0.0;
  double reach = 0.0;
  for (const SourceData& g : data) {
    lambda_max = std::max(lambda_max, g.bandwidth());
    for (double x : stations) {
      reach = std::max(reach, std::abs(x - (g.center - g.support_radius())));
      reach = std::max(reach, std::abs(x - (g.center + g.support_radius())));
    }
  }

  const ScatteringProblem problem(model, opts.jost_rtol,
                                  opts.jost_tail_budget);

  // The band starts at the data bandwidth, but the kernel itself can carry
  // band-edge mass on the potential's own scale. Whenever the measured
  // edge-zone magnitude does not fit the error budget, widen the band and
  // redo the synthesis.
  std::size_t evals_total = 0;
  double last_tail = 0.0;
  for (int attempt = 0;; ++attempt) {
    const QuadraturePlan plan =
        energy_split(t_max, lambda_max, reach, propagator);
    const std::size_t base_nodes = 15 * (plan.edges.size() - 1);
    if (base_nodes > opts.max_lambda_nodes) {
      if (attempt > 0) {
        std::ostringstream os;
        os << "evolve: band-edge mass " << last_tail
           << " calls for a band wider than the lambda node budget allows";
        throw AccuracyError(os.str());
      }
      const double phi_budget =
          kPhaseBudget * double(opts.max_lambda_nodes / 15);
      double t_feasible;
      if (propagator == Propagator::schrodinger)
        t_feasible = (phi_budget / lambda_max - reach) / lambda_max;
      else
        t_feasible = phi_budget / lambda_max - reach;
      std::ostringstream os;
      os << "evolve: " << base_nodes << " lambda nodes needed at t = " << t_max
         << " exceed the budget of " << opts.max_lambda_nodes
         << "; feasible range is t <= " << std::max(0.0, t_feasible);
      throw ValidationError(os.str());
    }

    const YQuadrature yq = build_y_quadrature(data, stations, lambda_max);

    QuadratureDiagnostics diag;

    // t-independent kernel contraction G_i(lambda) = sum_j mu(x_i, y_j) wg_j,
    // with the smooth bandwidth cutoff folded in; raw magnitudes inside the
    // cutoff zone feed the tail estimate.
    double zone_peak = 0.0;
    auto contract = [&](double lambda, std::vector<double>& out) {
      const std::vector<double> block =
          problem.spectral_kernel_block(lambda, stations, yq.y);
      diag.kernel_evals += nx * yq.y.size();
      const double cut = smooth_step_down(
          (lambda / lambda_max - kCutoffStart) / (1.0 - kCutoffStart));
      for (std::size_t i = 0; i < nx; ++i) {
        double acc = 0.0;
        const double* row = block.data() + i * yq.y.size();
        for (std::size_t j = 0; j < yq.y.size(); ++j) acc += row[j] * yq.wg[j];
        if (lambda >= kCutoffStart * lambda_max)
          zone_peak = std::max(zone_peak, std::abs(acc));
        out[i] = cut * acc;
      }
    };

    std::vector<Panel> panels(plan.edges.size() - 1);
    for (std::size_t k = 0; k < panels.size(); ++k) {
      panels[k].a = plan.edges[k];
      panels[k].b = plan.edges[k + 1];
    }

    std::vector<cplx> values(nt * nx);
    std::vector<double> err(nt * nx);
    std::vector<double> gtmp(nx);

    while (true) {
      for (Panel& p : panels) {
        if (!p.g.empty()) continue;
        p.rule = kronrod15(p.a, p.b);
        p.g.resize(15 * nx);
        for (int m = 0; m < 15; ++m) {
          contract(p.rule.x[m], gtmp);
          for (std::size_t i = 0; i < nx; ++i) p.g[m * nx + i] = gtmp[i];
        }
      }

      std::fill(values.begin(), values.end(), cplx(0.0));
      std::fill(err.begin(), err.end(), 0.0);
      std::vector<cplx> kron(nx), delta(nx);
      for (const Panel& p : panels) {
        for (std::size_t it = 0; it < nt; ++it) {
          std::fill(kron.begin(), kron.end(), cplx(0.0));
          std::fill(delta.begin(), delta.end(), cplx(0.0));
          for (int m = 0; m < 15; ++m) {
            const cplx f = propagator_factor(propagator, times[it], p.rule.x[m]);
            const cplx wk = p.rule.w_kronrod[m] * f;
            const cplx wd = (p.rule.w_kronrod[m] - p.rule.w_gauss[m]) * f;
            const double* row = p.g.data() + m * nx;
            for (std::size_t i = 0; i < nx; ++i) {
              kron[i] += wk * row[i];
              delta[i] += wd * row[i];
            }
          }
          for (std::size_t i = 0; i < nx; ++i) {
            values[it * nx + i] += kron[i];
            err[it * nx + i] += std::abs(delta[i]);
          }
        }
      }
      diag.rule_error = *std::max_element(err.begin(), err.end());
      if (diag.rule_error < 0.25 * opts.abs_tol || diag.refinement_depth >= 2)
        break;

      std::vector<Panel> refined;
      refined.reserve(2 * panels.size());
      for (const Panel& p : panels) {
        const double mid = 0.5 * (p.a + p.b);
        refined.push_back({p.a, mid, {}, {}});
        refined.push_back({mid, p.b, {}, {}});
      }
      panels.swap(refined);
      diag.refinement_depth += 1;
    }

    // Below the floor the kernel contraction is a clean power of lambda;
    // extrapolate it from three samples and integrate the fit against F_t on
    // panels graded toward zero.
    const double floor_ = plan.lambda_floor;
    const std::array<double, 3> slam{floor_, 1.5 * floor_, 2.25 * floor_};
    std::array<std::vector<double>, 3> sval;
    for (int m = 0; m < 3; ++m) {
      sval[m].resize(nx);
      contract(slam[m], sval[m]);
    }
    const double f_bound = propagator_bound(propagator, t_max, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
      const StripFit fit =
          fit_strip(slam, {sval[0][i], sval[1][i], sval[2][i]});
      if (fit.negligible) continue;
      double strip_mass = 0.0;  // integral of |fit| against the F_t bound
      double hi = floor_;
      for (int k = 0; k < 28; ++k) {
        const double lo = 0.25 * hi;
        const PanelRule rule = gauss16(lo, hi);
        for (std::size_t q = 0; q < rule.x.size(); ++q) {
          const double s = strip_value(fit, rule.x[q]);
          strip_mass += rule.w[q] * std::abs(s);
          for (std::size_t it = 0; it < nt; ++it)
            values[it * nx + i] +=
                propagator_factor(propagator, times[it], rule.x[q]) *
                (rule.w[q] * s);
        }
        hi = lo;
      }
      diag.strip_error = std::max(diag.strip_error,
                                  fit.residual * f_bound * strip_mass);
    }

    // Mass hidden by the smooth cutoff and beyond the bandwidth; the zone
    // magnitude decays there, so its width is a generous proxy.
    diag.tail_estimate =
        zone_peak * (1.0 - kCutoffStart) * lambda_max * 2.0 *
        propagator_bound(propagator, t_max, kCutoffStart * lambda_max);

    evals_total += diag.kernel_evals;
    if (diag.tail_estimate > 0.25 * opts.abs_tol && attempt < 3) {
      last_tail = diag.tail_estimate;
      lambda_max *= 1.4;
      continue;
    }

    if (diag.tail_estimate > opts.abs_tol)
      throw AccuracyError(
          "evolve: bandwidth truncation exceeds the accuracy budget (" +
          describe(diag) + ")");
    if (diag.error_estimate() > opts.abs_tol)
      throw AccuracyError("evolve: quadrature error above the budget after " +
                          std::to_string(diag.refinement_depth) +
                          " refinements (" + describe(diag) + ")");

    diag.kernel_evals = evals_total;
    WaveField field;
    field.propagator = propagator;
    field.times = times;
    field.stations = stations;
    field.values = std::move(values);
    field.diagnostics = diag;
    return field;
  }
}

cplx model_watson_integral(double a, double t, double eps) {
  if (!(a > 0.0)) throw ValidationError("model_watson_integral: a must be > 0");
  if (!(t > 0.0)) throw ValidationError("model_watson_integral: t must be > 0");
  if (!(eps > 0.0))
    throw ValidationError("model_watson_integral: eps must be > 0");

  // One-sided integral over [0, eps] on geometric panels toward the origin
  // (the integrand is only C^{floor 2a} there), each split further until
  // the phase advance per panel is a few radians.
  cplx one_sided = 0.0;
  const int levels =
      int(std::ceil(18.0 * std::log(10.0) / ((2.0 * a + 1.0) * std::log(2.0)))) +
      1;
  double hi = eps;
  for (int k = 0; k < levels; ++k) {
    const double lo = 0.5 * hi;
    const int parts =
        std::max(1, int(std::ceil(t * (hi - lo) / kPhaseBudget)));
    for (int s = 0; s < parts; ++s) {
      const double a0 = lo + (hi - lo) * s / parts;
      const double b0 = lo + (hi - lo) * (s + 1) / parts;
      const PanelRule rule = gauss16(a0, b0);
      for (std::size_t q = 0; q < rule.x.size(); ++q) {
        const double l = rule.x[q];
        const double amp =
            rule.w[q] * std::pow(l, 2.0 * a) * smooth_step_down(l / eps);
        one_sided += amp * std::polar(1.0, t * l);
      }
    }
    hi = lo;
  }
  // Join the two boundary values of z^{2a} across its cut: the lower
  // half-line contributes the conjugate, rotated by e^{-i a pi}.
  const double joined =
      2.0 * (std::polar(1.0, a * kPi) * one_sided).real();
  return cplx(0.0, joined);
}

}  // namespace wavelab
