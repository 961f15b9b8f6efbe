#include "wavelab/decayfit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wavelab/numerics.hpp"
#include "wavelab/scattering.hpp"
#include "wavelab/types.hpp"

namespace wavelab {

namespace {

void check_series(const StationSeries& s) {
  if (s.times.empty() || s.times.size() != s.values.size())
    throw ValidationError(
        "decayfit: series needs matching, nonempty time and value arrays");
  if (!std::isfinite(s.station))
    throw ValidationError("decayfit: station coordinate must be finite");
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (!std::isfinite(s.times[i]) || !std::isfinite(s.values[i]))
      throw ValidationError("decayfit: series samples must be finite");
    if (i > 0 && !(s.times[i] > s.times[i - 1]))
      throw ValidationError("decayfit: times must be strictly increasing");
  }
}

// Indices of the strict right-majorant of |values|: i survives iff
// |v_i| exceeds every later |v_j|. Scanning from the right makes this a
// single pass; zeros can never beat the running best and drop out.
std::vector<std::size_t> majorant_indices(const std::vector<double>& values) {
  std::vector<std::size_t> keep;
  double best = 0.0;
  for (std::size_t k = values.size(); k-- > 0;) {
    const double m = std::abs(values[k]);
    if (m > best) {
      keep.push_back(k);
      best = m;
    }
  }
  std::reverse(keep.begin(), keep.end());
  return keep;
}

}  // namespace

StationSeries station_slice(const WaveField& field, std::size_t index) {
  if (index >= field.stations.size())
    throw ValidationError("station_slice: station index out of range");
  if (field.values.size() != field.times.size() * field.stations.size())
    throw ValidationError("station_slice: field storage is inconsistent");
  StationSeries out;
  out.station = field.stations[index];
  out.times = field.times;
  out.values.reserve(field.times.size());
  for (std::size_t it = 0; it < field.times.size(); ++it)
    out.values.push_back(field.at(it, index).real());
  return out;
}

StationSeries decay_envelope(const StationSeries& series) {
  check_series(series);
  StationSeries out;
  out.station = series.station;
  for (std::size_t i : majorant_indices(series.values)) {
    out.times.push_back(series.times[i]);
    out.values.push_back(std::abs(series.values[i]));
  }
  return out;
}

DecayReport fit_power_law(const StationSeries& series, DecayWindow window,
                          double ringdown_exclusion) {
  check_series(series);
  const double slack =
      1e-9 * (1.0 + std::abs(series.times.front()) +
              std::abs(series.times.back()));
  if (!(window.t_lo < window.t_hi))
    throw ValidationError("fit_power_law: window must satisfy t_lo < t_hi");
  if (window.t_lo < series.times.front() - slack ||
      window.t_hi > series.times.back() + slack)
    throw ValidationError(
        "fit_power_law: window leaves the sampled time range");

  double exclusion = ringdown_exclusion;
  if (std::isnan(exclusion))
    exclusion = std::max(50.0, 3.0 * std::abs(series.station));
  else if (!(exclusion >= 0.0))
    throw ValidationError(
        "fit_power_law: ringdown exclusion must be nonnegative");
  const double t_lo = std::max(window.t_lo, exclusion);

  std::vector<double> ts, vs;
  double peak = 0.0;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < t_lo - slack || t > window.t_hi + slack) continue;
    ts.push_back(t);
    vs.push_back(series.values[i]);
    peak = std::max(peak, std::abs(series.values[i]));
  }
  if (!(peak > 0.0))
    throw ValidationError(
        "fit_power_law: series is identically zero on the fit window");
  if (!(ts.front() > 0.0))
    throw ValidationError(
        "fit_power_law: the fit window must sit at positive times");

  const std::vector<std::size_t> env = majorant_indices(vs);
  if (env.size() < 8)
    throw ValidationError(
        "fit_power_law: insufficient data: the envelope has fewer than 8 "
        "points on the fit window");

  std::vector<double> lx, ly;
  lx.reserve(env.size());
  ly.reserve(env.size());
  for (std::size_t i : env) {
    lx.push_back(std::log(ts[i]));
    ly.push_back(std::log(std::abs(vs[i])));
  }
  const LineFit fit = fit_line(lx, ly);

  DecayReport out;
  out.station = series.station;
  out.t_lo = t_lo;
  out.t_hi = window.t_hi;
  out.alpha_hat = -fit.slope;
  out.r2 = fit.r2;
  out.envelope_points = env.size();
  out.low_confidence = fit.r2 < 0.9;
  return out;
}

TheoryExponent theory_exponent(const PotentialModel& model,
                               Propagator propagator, bool data_mean_zero) {
  if (propagator == Propagator::schrodinger)
    throw ValidationError(
        "theory_exponent: no local decay law is stated for the schrodinger "
        "propagator");
  const bool sinc = propagator == Propagator::sinc;

  if (model.as<FreePotential>()) {
    if (sinc && !data_mean_zero)
      return {0.0, false, "free sinc plateau: the data mean never decays"};
    return {std::numeric_limits<double>::infinity(), false,
            sinc ? "mean-zero free data: faster than any power"
                 : "free cosine flow: faster than any power"};
  }

  if (const auto* rw = model.as<ReggeWheelerPotential>()) {
    if (detect_zero_resonance(model).resonant)
      throw ValidationError(
          "theory_exponent: the (ell, sigma) = (" + std::to_string(rw->ell) +
          ", " + std::to_string(rw->sigma) +
          ") mode carries a zero-energy resonance; the decay law does not "
          "apply");
    if (sinc)
      return {2.0 * rw->ell + 2.0, false, "regge-wheeler sinc rate 2l+2"};
    return {2.0 * rw->ell + 3.0, false, "regge-wheeler cosine rate 2l+3"};
  }

  if (const auto* ism = model.as<InverseSquareModelPotential>()) {
    const double doubled = 2.0 * ism->a;
    if (std::abs(doubled - std::round(doubled)) < 1e-12 &&
        static_cast<long long>(std::llround(doubled)) % 2 != 0)
      return {std::numeric_limits<double>::infinity(), true,
              "exceptional half-integer order: faster than any power"};
    if (sinc)
      return {2.0 * ism->a + 1.0, false, "inverse-square sinc rate 2a+1"};
    return {2.0 * ism->a + 2.0, false, "inverse-square cosine rate 2a+2"};
  }

  throw ValidationError(
      "theory_exponent: no decay law is stated for the " + model.name() +
      " family");
}

DecayReport with_theory(DecayReport report, const TheoryExponent& theory) {
  report.theory_exponent = theory.exponent;
  report.theory_exceptional = theory.exceptional;
  report.theory_source = theory.source;
  return report;
}

}  // namespace wavelab
