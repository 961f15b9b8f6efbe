#pragma once
// Propagators of H = -d^2/dx^2 + V synthesized from the spectral kernel:
//
//   psi(t, x) = integral over lambda in (0, inf) of
//                 F_t(lambda) * integral mu(lambda; x, y) g(y) dy
//
// with F_t = cos(t lambda), sin(t lambda)/lambda, or exp(i t lambda^2) for
// the three propagators cos(t sqrt(H)), sin(t sqrt(H))/sqrt(H), exp(itH).
// The lambda integral is cut off smoothly at the data's bandwidth, split
// into phase-limited Gauss-Kronrod panels, and extended below a small
// lambda floor by a fitted power law (the kernel behaves like a power of
// lambda there; evaluating Jost solutions at ever smaller lambda is wasted
// effort once the fit residual is below the accuracy target).

#include <cstddef>
#include <vector>

#include "wavelab/potential.hpp"
#include "wavelab/types.hpp"

namespace wavelab {

enum class Propagator { cosine, sinc, schrodinger };

const char* to_string(Propagator p);

enum class SourceProfile { gaussian_bump, mean_zero_doublet, compact_bump };

const char* to_string(SourceProfile p);

// Localized data g fed to the propagators.
//   gaussian_bump      A exp(-(x-c)^2 / 2w^2)
//   mean_zero_doublet  -A (x-c)/w exp(-(x-c)^2 / 2w^2), integral exactly 0
//   compact_bump       A e exp(-1/(1 - u^2)), u = (x-c)/w, zero for |u| >= 1
struct SourceData {
  SourceProfile profile = SourceProfile::gaussian_bump;
  double center = 0.0;
  double width = 1.0;
  double amplitude = 1.0;

  double operator()(double x) const;
  // Half-width beyond which the profile is negligible (exact for the
  // compact bump, 8 widths otherwise).
  double support_radius() const;
  // Frequency cutoff beyond which the profile's transform is negligible
  // against the module's accuracy target (the gaussian shapes decay like
  // exp(-w^2 lambda^2 / 2), the compact bump only like exp(-sqrt(w lambda))).
  double bandwidth() const;
  // Integral of the profile over the line.
  double mean() const;
};

struct QuadratureDiagnostics {
  double rule_error = 0.0;      // embedded Gauss/Kronrod estimate, max point
  double strip_error = 0.0;     // small-lambda extrapolation residual
  double tail_estimate = 0.0;   // mass discarded beyond the bandwidth cutoff
  int refinement_depth = 0;     // global panel doublings that were needed
  std::size_t kernel_evals = 0; // spectral kernel evaluations performed

  double error_estimate() const {
    return rule_error + strip_error + tail_estimate;
  }
};

struct WaveField {
  Propagator propagator = Propagator::cosine;
  std::vector<double> times;
  std::vector<double> stations;
  // values[it * stations.size() + ix]; real data under the two wave
  // propagators produces real values (imaginary parts vanish identically).
  std::vector<cplx> values;
  QuadratureDiagnostics diagnostics;

  cplx at(std::size_t it, std::size_t ix) const {
    return values[it * stations.size() + ix];
  }
};

struct EvolveOptions {
  double abs_tol = 1e-6;   // per-point quadrature error target
  // Refusal threshold for the lambda node count; large times need
  // proportionally many oscillation-limited panels.
  std::size_t max_lambda_nodes = 400000;
  // Accuracy of the underlying Jost solver. The evolution target is much
  // coarser than the scattering default, so these are relaxed.
  double jost_rtol = 1e-10;
  double jost_tail_budget = 1e-9;
};

// Energy quadrature plan: panels on [lambda_floor, lambda_max] cut at equal
// increments of the worst-case phase t*lambda + reach*lambda (wave) or
// t*lambda^2 + reach*lambda (schrodinger), a few radians each, so a 15-point
// rule per panel resolves every oscillation. reach is the largest |x - y|
// the kernel is evaluated at; it oscillates in lambda at that rate.
struct QuadraturePlan {
  std::vector<double> edges;    // ascending, front() == lambda_floor
  double lambda_floor = 0.0;
  double error_bound = 0.0;     // a priori, for a unit-amplitude integrand
};

QuadraturePlan energy_split(double t, double lambda_max, double reach,
                            Propagator propagator);

WaveField evolve(const PotentialModel& model, Propagator propagator,
                 const SourceData& data, const std::vector<double>& times,
                 const std::vector<double>& stations,
                 const EvolveOptions& opts = {});

// Several sources evolved together as one field; each source keeps its own
// spatial quadrature, so this is the reference point for linearity checks.
WaveField evolve(const PotentialModel& model, Propagator propagator,
                 const std::vector<SourceData>& data,
                 const std::vector<double>& times,
                 const std::vector<double>& stations,
                 const EvolveOptions& opts = {});

// Model of how a |lambda|^{2a} edge in the spectral density at zero energy
// turns into power-law decay in time. Evaluates
//
//   i * integral over [-eps, eps] of
//       exp(i t lambda) exp(i a pi sgn lambda) |lambda|^{2a} chi(|lambda|)
//
// with chi a smooth cutoff vanishing at eps; the two half-lines carry the
// boundary values of z^{2a} on either side of its branch cut. For 2a not an
// integer the modulus decays like 2|sin(2a pi)| Gamma(2a+1) t^{-(2a+1)}; at
// integer 2a that prefactor vanishes and the decay is governed by the
// cutoff's smoothness instead (faster than any power). The result is purely
// imaginary; at t = 0 it equals 2i cos(a pi) integral of lambda^{2a} chi.
cplx model_watson_integral(double a, double t, double eps);

}  // namespace wavelab
