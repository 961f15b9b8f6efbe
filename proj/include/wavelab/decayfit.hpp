#pragma once
// Power-law decay measurement for station time series.
//
// A tail obeying |psi(t)| ~ C t^-alpha oscillates through zeros under the
// sinc propagator, so raw samples cannot be fitted directly. The envelope
// used here is the strict right-majorant of |psi|: the subsequence of
// points that exceed every later sample. It contains every local crest,
// reduces to the series itself on monotone data, and is idempotent; zeros
// never enter. alpha is then the negated slope of log|psi| vs log t by
// ordinary least squares over the envelope.
//
// Fits never start before the ringdown exclusion time max(50, 3|x|) at
// station x (explicitly overridable): the early signal is dominated by
// exponentially damped transients, and the power tail only emerges after
// the barrier has been crossed a few times.

#include <limits>
#include <string>
#include <vector>

#include "wavelab/evolution.hpp"
#include "wavelab/potential.hpp"

namespace wavelab {

struct StationSeries {
  double station = 0.0;
  std::vector<double> times;   // strictly increasing
  std::vector<double> values;  // signal at the station, one per time
};

// One column of a wave field (spectral or finite-difference; both store
// real data for the wave propagators).
StationSeries station_slice(const WaveField& field, std::size_t index);

struct DecayWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

struct DecayReport {
  double station = 0.0;
  // effective fit window; t_lo is never below the ringdown exclusion
  double t_lo = 0.0;
  double t_hi = 0.0;
  double alpha_hat = 0.0;  // negated log-log slope
  double r2 = 0.0;
  std::size_t envelope_points = 0;  // >= 8 on every reportable fit
  bool low_confidence = false;      // r2 < 0.9; reported, not refused
  // filled by with_theory; NaN / empty until joined
  double theory_exponent = std::numeric_limits<double>::quiet_NaN();
  bool theory_exceptional = false;
  std::string theory_source;
};

// Strict right-majorant of |values| (see file comment). Keeps the station
// coordinate; drops zeros.
StationSeries decay_envelope(const StationSeries& series);

// Envelope + least-squares exponent over window intersected with
// [ringdown_exclusion, inf). ringdown_exclusion = NaN (default) applies
// the max(50, 3|station|) rule. Throws ValidationError on malformed
// series, a window that leaves the sampled range, an identically zero
// window, or fewer than 8 envelope points.
DecayReport fit_power_law(
    const StationSeries& series, DecayWindow window,
    double ringdown_exclusion = std::numeric_limits<double>::quiet_NaN());

struct TheoryExponent {
  // +inf when the decay is faster than any power
  double exponent = 0.0;
  bool exceptional = false;
  std::string source;  // short tag naming the law the number came from
};

// Local-decay exponent the theorems predict for this model and data class.
//   regge_wheeler(ell, sigma): sinc 2*ell+2, cosine 2*ell+3, refused when
//     the mode carries a zero-energy resonance (detected, not tabulated);
//   inverse_square_model(a):   sinc 2a+1,    cosine 2a+2; half-integer a
//     is exceptional: faster than any power;
//   free line: faster than any power, except sinc data with nonzero mean,
//     whose d'Alembert plateau never decays (exponent 0).
// Everything else (including the schrodinger propagator) is refused with
// ValidationError: no stated law.
TheoryExponent theory_exponent(const PotentialModel& model,
                               Propagator propagator, bool data_mean_zero);

// Copy of the report with the theory columns filled in.
DecayReport with_theory(DecayReport report, const TheoryExponent& theory);

}  // namespace wavelab
