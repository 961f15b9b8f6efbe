#pragma once
// Jost solutions of -f'' + V f = lambda^2 f and everything derived from
// them: the wronskian, transmission and reflection, the spectral kernel,
// zero-energy resonance detection, and the small-lambda wronskian power.
//
// Conventions. f+ ~ e^{+i lambda x} as x -> +inf and f- ~ e^{-i lambda x}
// as x -> -inf, each relative to the reference outgoing wave of its side:
// the plane wave on zero or exponentially decaying sides, the Hankel form
// of outgoing_wave on inverse-square sides, a two-term corrected plane
// wave on inverse-cube sides. With W = W(f+, f-) = f+ f-' - f+' f-:
//   T = -2 i lambda / W,
//   R_left = -W(f+, conj f-) / W,   R_right = +W(f-, conj f+) / W,
// and |T|^2 + |R|^2 = 1 side by side. The spectral kernel
//   mu(lambda; x, y) = (2 lambda / pi) Im[f+(max) f-(min) / W]
// reduces to cos(lambda (x - y)) / pi on the free line.

#include <vector>

#include "wavelab/potential.hpp"
#include "wavelab/specfun.hpp"
#include "wavelab/types.hpp"

namespace wavelab {

struct JostSamples {
  std::vector<double> x;
  std::vector<OutgoingWave> f;  // value and x-derivative at each sample
  double seeded_at = 0.0;       // mirrored coordinate of the far-field seed
};

struct WronskianValue {
  cplx value;
  double spread;  // relative disagreement across interior stations
};

struct ScatteringCoefficients {
  cplx transmission;
  cplx reflection_left;
  cplx reflection_right;
  double unitarity_defect;
};

class ScatteringProblem {
 public:
  // rtol controls the phase-extracted integration; tail_budget bounds the
  // far-field truncation error of each Jost seed.
  explicit ScatteringProblem(PotentialModel model, double rtol = 1e-12,
                             double tail_budget = 1e-11);

  const PotentialModel& model() const { return model_; }

  // side +1 seeds at +inf, side -1 at -inf; xs strictly ascending.
  JostSamples jost(int side, double lambda, std::vector<double> xs) const;
  OutgoingWave jost_at(int side, double lambda, double x) const;

  WronskianValue wronskian(double lambda) const;
  ScatteringCoefficients coefficients(double lambda) const;

  double spectral_kernel(double lambda, double x, double y) const;
  // One row of the kernel: mu(lambda; x, y) for every y (one integration
  // per side instead of one per point).
  std::vector<double> spectral_kernel_row(double lambda, double x,
                                          const std::vector<double>& ys) const;
  // Full block for a set of stations against a set of data points, again
  // from a single Jost pair: result[i * ys.size() + j] = mu(xs[i], ys[j]).
  std::vector<double> spectral_kernel_block(double lambda,
                                            const std::vector<double>& xs,
                                            const std::vector<double>& ys) const;

 private:
  PotentialModel model_;
  TailClass tail_left_, tail_right_;
  double rtol_, tail_budget_;
};

struct ResonanceReport {
  bool resonant = false;
  double normalized_wronskian = 0.0;  // |W(uL, uR)| over the state norms
  double threshold = 0.0;
};

// Integrates the zero-energy equation u'' = V u from both far fields with
// the subordinate branch of each tail and reports whether the two halves
// glue into a global bounded solution.
ResonanceReport detect_zero_resonance(const PotentialModel& model,
                                      double threshold = 1e-6);

struct PowerFit {
  double exponent = 0.0;
  double r2 = 0.0;
  std::vector<double> lambda;
  std::vector<double> magnitude;
};

// log-log slope of |W(lambda)| over a geometric grid in [lo, hi]. Refuses
// zero-energy-resonant problems with an inverse-square side: the generic
// power law does not apply there.
PowerFit wronskian_small_lambda(const ScatteringProblem& problem, double lo,
                                double hi, int count);

}  // namespace wavelab
