#include "wavelab/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "wavelab/types.hpp"

namespace wavelab {
namespace {

double source_radius(const SourceData& d) {
  return d.amplitude == 0.0 ? 0.0 : d.support_radius();
}

double l2_norm(const std::vector<double>& u, double h) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s * h);
}

}  // namespace

std::string to_string(FdBoundary boundary) {
  switch (boundary) {
    case FdBoundary::causal_truncation:
      return "causal_truncation";
    case FdBoundary::sommerfeld:
      return "sommerfeld";
  }
  return "unknown";
}

WaveField fd_evolve(const PotentialModel& model, const SourceData& f,
                    const SourceData& g, const FdConfig& cfg,
                    const std::vector<double>& stations,
                    FdDiagnostics* diagnostics) {
  for (const SourceData* d : {&f, &g})
    if (!(d->width > 0.0) || !std::isfinite(d->width) ||
        !std::isfinite(d->amplitude) || !std::isfinite(d->center))
      throw ValidationError("fd_evolve: malformed source");
  if (!(cfg.half_width > 0.0) || !std::isfinite(cfg.half_width))
    throw ValidationError("fd_evolve: half_width must be positive");
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step))
    throw ValidationError("fd_evolve: step must be positive");
  if (!(cfg.courant > 0.0) || cfg.courant > 1.0)
    throw ValidationError("fd_evolve: courant ratio must lie in (0, 1]");
  if (!(cfg.final_time >= 0.0) || !std::isfinite(cfg.final_time))
    throw ValidationError("fd_evolve: final_time must be >= 0");
  if (stations.empty()) throw ValidationError("fd_evolve: no stations");

  const double L = cfg.half_width;
  const double h = cfg.step;
  const double n_real = 2.0 * L / h;
  const std::size_t N = static_cast<std::size_t>(std::llround(n_real));
  if (N < 4 || std::abs(n_real - double(N)) > 1e-9 * std::max(1.0, n_real))
    throw ValidationError("fd_evolve: step must tile [-L, L] exactly");

  double reach = 0.0;
  for (double x : stations) {
    if (!std::isfinite(x) || std::abs(x) > L)
      throw ValidationError("fd_evolve: station outside the grid");
    reach = std::max(reach, std::abs(x));
  }
  const double radius = std::max(source_radius(f), source_radius(g));
  if (cfg.boundary == FdBoundary::causal_truncation &&
      L < reach + cfg.final_time + radius - 1e-12) {
    std::ostringstream os;
    os << "fd_evolve: causal truncation needs half_width >= "
       << reach + cfg.final_time + radius << " to keep every station's "
       << "light cone inside the grid, got " << L;
    throw ValidationError(os.str());
  }

  const double dt = cfg.courant * h;
  const std::size_t steps =
      static_cast<std::size_t>(std::ceil(cfg.final_time / dt - 1e-12));
  const std::size_t nx = stations.size();

  std::vector<double> V(N + 1);
  for (std::size_t j = 0; j <= N; ++j) {
    const double v = model(-L + h * double(j));
    V[j] = std::abs(v) < 1e-300 ? 0.0 : v;
  }

  // linear interpolation taps for the stations
  std::vector<std::size_t> tapj(nx);
  std::vector<double> tapw(nx);
  for (std::size_t s = 0; s < nx; ++s) {
    const double pos = (stations[s] + L) / h;
    std::size_t j = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
    if (j >= N) j = N - 1;
    tapj[s] = j;
    tapw[s] = pos - double(j);
  }

  WaveField field;
  field.propagator = (f.amplitude == 0.0 && g.amplitude != 0.0)
                         ? Propagator::sinc
                         : Propagator::cosine;
  field.stations = stations;
  field.times.resize(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) field.times[n] = double(n) * dt;
  field.values.assign((steps + 1) * nx, cplx(0.0));

  std::vector<double> prev(N + 1), cur(N + 1), next(N + 1, 0.0), gv(N + 1);
  for (std::size_t j = 0; j <= N; ++j) {
    prev[j] = f(-L + h * double(j));
    gv[j] = g(-L + h * double(j));
  }

  auto record = [&](std::size_t level, const std::vector<double>& u) {
    for (std::size_t s = 0; s < nx; ++s)
      field.values[level * nx + s] =
          (1.0 - tapw[s]) * u[tapj[s]] + tapw[s] * u[tapj[s] + 1];
  };
  record(0, prev);

  FdDiagnostics diag;
  diag.steps = steps;
  const double q = (cfg.courant - 1.0) / (cfg.courant + 1.0);  // Mur weight
  const double ih2 = 1.0 / (h * h);

  // startup level: Taylor to third order, psi_tt = psi_xx - V psi
  for (std::size_t j = 1; j < N; ++j) {
    const double lf = (prev[j + 1] - 2.0 * prev[j] + prev[j - 1]) * ih2;
    const double lg = (gv[j + 1] - 2.0 * gv[j] + gv[j - 1]) * ih2;
    cur[j] = prev[j] + dt * gv[j] +
             0.5 * dt * dt * (lf - V[j] * prev[j]) +
             dt * dt * dt / 6.0 * (lg - V[j] * gv[j]);
  }
  if (cfg.boundary == FdBoundary::sommerfeld) {
    cur[0] = prev[1] + q * (cur[1] - prev[0]);
    cur[N] = prev[N - 1] + q * (cur[N - 1] - prev[N]);
  } else {
    cur[0] = cur[N] = 0.0;
  }
  if (steps >= 1) record(1, cur);

  const double norm_ref =
      std::max({l2_norm(prev, h), l2_norm(cur, h), 1e-300});

  double energy_prev = -1.0;
  const double c2 = cfg.courant * cfg.courant;
  for (std::size_t n = 1; n < steps; ++n) {
    for (std::size_t j = 1; j < N; ++j)
      next[j] = 2.0 * cur[j] - prev[j] +
                c2 * (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]) -
                dt * dt * V[j] * cur[j];
    if (cfg.boundary == FdBoundary::sommerfeld) {
      next[0] = cur[1] + q * (next[1] - cur[0]);
      next[N] = cur[N - 1] + q * (next[N - 1] - cur[N]);
    } else {
      next[0] = next[N] = 0.0;
    }
    diag.node_updates += N - 1;
    record(n + 1, next);

    // centered discrete energy at the middle level
    double e = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double dx = (cur[j + 1] - cur[j]) / h;
      e += dx * dx;
    }
    for (std::size_t j = 1; j < N; ++j) {
      const double dtc = (next[j] - prev[j]) / (2.0 * dt);
      e += dtc * dtc + V[j] * cur[j] * cur[j];
    }
    e *= h;
    if (energy_prev < 0.0) {
      diag.energy_initial = e;
    } else if (diag.energy_initial > 0.0) {
      diag.max_energy_step_increase =
          std::max(diag.max_energy_step_increase,
                   (e - energy_prev) / diag.energy_initial);
    }
    energy_prev = e;

    const double ratio = l2_norm(next, h) / norm_ref;
    diag.max_norm_ratio = std::max(diag.max_norm_ratio, ratio);
    if (ratio > 1e6) {
      if (diagnostics) *diagnostics = diag;
      std::ostringstream os;
      os << "fd_evolve: instability: field norm grew " << ratio
         << "-fold by t = " << double(n + 1) * dt << " (step " << n + 1
         << "); check the Courant ratio against the potential";
      throw AccuracyError(os.str());
    }

    std::swap(prev, cur);
    std::swap(cur, next);
  }

  if (diagnostics) *diagnostics = diag;
  return field;
}

FieldDistance compare_fields(const WaveField& a, const WaveField& b,
                             double weight_exponent) {
  auto match_axis = [](const std::vector<double>& u,
                       const std::vector<double>& v) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::pair<double, std::size_t>> sorted(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) sorted[j] = {v[j], j};
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double tol = 1e-9 * std::max(1.0, std::abs(u[i]));
      auto it = std::lower_bound(sorted.begin(), sorted.end(),
                                 std::make_pair(u[i] - tol, std::size_t{0}));
      if (it != sorted.end() && std::abs(it->first - u[i]) <= tol)
        pairs.emplace_back(i, it->second);
    }
    return pairs;
  };

  const auto tpairs = match_axis(a.times, b.times);
  const auto xpairs = match_axis(a.stations, b.stations);
  if (tpairs.empty() || xpairs.empty())
    throw ValidationError("compare_fields: no common (time, station) subgrid");

  double peak = 0.0, worst = 0.0, num = 0.0, den = 0.0;
  for (const auto& [ia, ib] : tpairs) {
    for (const auto& [ja, jb] : xpairs) {
      const double x = a.stations[ja];
      const double w = std::pow(1.0 + x * x, -0.5 * weight_exponent);
      const double va = std::abs(a.at(ia, ja));
      const double d = std::abs(a.at(ia, ja) - b.at(ib, jb));
      peak = std::max(peak, va);
      worst = std::max(worst, d);
      num += w * d * d;
      den += w * va * va;
    }
  }
  FieldDistance out;
  out.max_rel_err = worst == 0.0 ? 0.0 : worst / std::max(peak, 1e-300);
  out.weighted_l2_err =
      num == 0.0 ? 0.0 : std::sqrt(num / std::max(den, 1e-300));
  return out;
}

}  // namespace wavelab
