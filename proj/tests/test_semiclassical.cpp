#include "doctest.h"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "wavelab/types.hpp"
#include "wavelab/potential.hpp"
#include "wavelab/semiclassical.hpp"

using namespace wavelab;

namespace {

// Inverse-square peak whose strength is lowered so the hbar correction
// folds back to exactly 2/(1+x^2); every frozen number below refers to
// that barrier, independently of hbar.
PotentialModel folded_barrier(double hbar) {
  return PotentialModel::inverse_square_peak(2.0 - 0.25 * hbar * hbar);
}

constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kSqrt7 = 2.6457513110645905905;

// Reference values for the 2/(1+x^2) barrier (40-digit quadrature).
constexpr double kActionQuarter = 3.815488366178478903;   // S at E = 0.25
constexpr double kTplusQuarter = 2.1503033573730690001;   // T+ at E = 0.25
constexpr double kActionHalf = 2.6741636343655836267;     // S at E = 0.5
constexpr double kTplusHalf = 2.0753049587178038292;      // T+ at E = 0.5
constexpr double kZetaTwoX1 = 1.113227741780967;          // zeta(2 x1), E = 0.5
constexpr double kQLimitHalf = 0.5723571212766659;        // |V0'(x1)|^(2/3)

// Far part of the phase action for the 2/(1+x^2) barrier from Y outward,
// by the series of sqrt(E - w) - sqrt(E) in w = 2/(1+x^2) integrated in
// closed form (three terms; Y is far enough that the rest is < 1e-14).
double tail_series(double E, double Y) {
  const double pi = std::numbers::pi;
  const double at = pi / 2.0 - std::atan(Y);
  const double j1 = at;
  const double j2 = at / 2.0 - Y / (2.0 * (1.0 + Y * Y));
  const double j3 = 3.0 * at / 8.0 - Y / (4.0 * std::pow(1.0 + Y * Y, 2.0)) -
                    3.0 * Y / (8.0 * (1.0 + Y * Y));
  const double c = 2.0;
  return -c * j1 / (2.0 * std::sqrt(E)) - c * c * j2 / (8.0 * std::pow(E, 1.5)) -
         c * c * c * j3 / (16.0 * std::pow(E, 2.5));
}

}  // namespace

TEST_SUITE("semiclassical") {

TEST_CASE("turning points hit the corrected barrier line") {
  SUBCASE("closed-form roots of the folded barrier") {
    const PotentialModel m = folded_barrier(0.1);
    const auto [x2, x1] = turning_points(m, 0.5, 0.1);
    CHECK(x1 == doctest::Approx(kSqrt3).epsilon(1e-12));
    CHECK(std::abs(x2 + x1) < 1e-10);

    const auto [y2, y1] = turning_points(m, 0.25, 0.1);
    CHECK(y1 == doctest::Approx(kSqrt7).epsilon(1e-12));
    CHECK(std::abs(y2 + y1) < 1e-10);
  }

  SUBCASE("residuals stay below 1e-10 across energies") {
    const PotentialModel m = PotentialModel::inverse_square_peak(2.0);
    for (double E : {0.1, 0.3, 0.5}) {
      const auto [x2, x1] = turning_points(m, E, 0.05);
      CHECK(x2 < 0.0);
      CHECK(x1 > 0.0);
      CHECK(std::abs(corrected_potential(m, 0.05, x1) - E) < 1e-10);
      CHECK(std::abs(corrected_potential(m, 0.05, x2) - E) < 1e-10);
      CHECK(std::abs(x2 + x1) < 1e-10);  // even barrier
    }
  }

  SUBCASE("asymmetric barrier peaked away from the origin") {
    const PotentialModel m = PotentialModel::regge_wheeler(1.0, 1, 1.0);
    const auto [x2, x1] = turning_points(m, 0.05, 0.1);
    CHECK(x2 < x1);
    CHECK(std::abs(corrected_potential(m, 0.1, x1) - 0.05) < 1e-10);
    CHECK(std::abs(corrected_potential(m, 0.1, x2) - 0.05) < 1e-10);
  }
}

TEST_CASE("energies outside the single-barrier regime are refused") {
  const PotentialModel m = PotentialModel::inverse_square_peak(2.0);

  SUBCASE("at or above the barrier top") {
    // barrier top of V0 at hbar = 0.1 is 2 + 0.0025
    CHECK_THROWS_AS(turning_points(m, 2.1, 0.1), ValidationError);
    CHECK_THROWS_AS(turning_points(m, 2.0025, 0.1), ValidationError);
  }

  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(turning_points(m, -0.5, 0.1), ValidationError);
    CHECK_THROWS_AS(turning_points(m, 0.0, 0.1), ValidationError);
    CHECK_THROWS_AS(turning_points(m, 0.5, 0.0), ValidationError);
    CHECK_THROWS_AS(turning_points(m, 0.5, -0.1), ValidationError);
    CHECK_THROWS_AS(turning_points(m, 0.5, 1.0), ValidationError);
    CHECK_THROWS_AS(action_integrals(m, 0.0, 0.1), ValidationError);
    CHECK_THROWS_AS(wkb_vs_exact(m, 0.5, 1.5), ValidationError);
  }

  SUBCASE("an energy line that meets the barrier twice per side") {
    std::vector<double> xs, vs;
    for (double x = -80.0; x <= 80.0 + 1e-9; x += 0.1) {
      xs.push_back(x);
      vs.push_back(2.0 / (1.0 + (x - 6.0) * (x - 6.0)) +
                   2.0 / (1.0 + (x + 6.0) * (x + 6.0)));
    }
    const PotentialModel twin = PotentialModel::tabulated(xs, vs);
    CHECK_THROWS_AS(turning_points(twin, 0.5, 0.1), ValidationError);
  }
}

TEST_CASE("action integrals match the frozen references") {
  const PotentialModel m = folded_barrier(0.1);

  SUBCASE("E = 0.25") {
    const WkbData d = action_integrals(m, 0.25, 0.1);
    CHECK(d.energy == 0.25);
    CHECK(d.hbar == 0.1);
    CHECK(std::abs(d.action - kActionQuarter) < 1e-9);
    CHECK(std::abs(d.t_plus - kTplusQuarter) < 1e-9);
    CHECK(std::abs(d.t_minus - kTplusQuarter) < 1e-9);  // even barrier
    CHECK(d.t_total == d.t_plus + d.t_minus);
    CHECK(d.sigma11_abs ==
          doctest::Approx(std::exp(-d.action / d.hbar)).epsilon(1e-13));
    CHECK(d.action > 0.0);
  }

  SUBCASE("E = 0.5") {
    const WkbData d = action_integrals(m, 0.5, 0.1);
    CHECK(std::abs(d.action - kActionHalf) < 1e-9);
    CHECK(std::abs(d.t_plus - kTplusHalf) < 1e-9);
    CHECK(std::abs(d.t_minus - kTplusHalf) < 1e-9);
  }

  SUBCASE("the folded barrier is the same barrier at every hbar") {
    const WkbData a = action_integrals(folded_barrier(0.1), 0.25, 0.1);
    const WkbData b = action_integrals(folded_barrier(0.05), 0.25, 0.05);
    CHECK(std::abs(a.action - b.action) < 1e-9);
    CHECK(std::abs(a.t_plus - b.t_plus) < 1e-9);
  }
}

TEST_CASE("barrier action grows like the tail logarithm at small energy") {
  const PotentialModel m = folded_barrier(0.1);
  // S(E) / (2 nu |log sqrt E|) with nu = sqrt(2) approaches 1 from above
  std::vector<double> ratio;
  for (double E : {1e-2, 1e-4, 1e-6}) {
    const WkbData d = action_integrals(m, E, 0.1);
    ratio.push_back(d.action /
                    (2.0 * std::sqrt(2.0) * std::abs(std::log(std::sqrt(E)))));
  }
  CHECK(ratio[0] == doctest::Approx(1.31608815565).epsilon(1e-8));
  CHECK(ratio[1] == doctest::Approx(1.15912304989).epsilon(1e-8));
  CHECK(ratio[2] == doctest::Approx(1.10609334606).epsilon(1e-8));
  CHECK(ratio[0] > ratio[1]);
  CHECK(ratio[1] > ratio[2]);
  CHECK(ratio[2] > 1.0);
}

TEST_CASE("merging turning points collapse the action") {
  // barrier top of the folded barrier is exactly 2
  const PotentialModel m = folded_barrier(0.1);
  const WkbData d = action_integrals(m, 2.0 - 2e-4, 0.1);
  CHECK(d.action > 0.0);
  CHECK(d.action < 5e-4);
  CHECK(d.x1 > 0.0);
  CHECK(d.x1 < 0.02);
}

TEST_CASE("actions agree with an independent quadrature route") {
  // tanh-sinh on the raw integrands (no turning-point substitution, no
  // node doubling) against the module's adapted quadratures
  const double E = 0.037;
  const PotentialModel m = folded_barrier(0.1);
  const WkbData d = action_integrals(m, E, 0.1);

  auto v0 = [&](double x) { return 2.0 / (1.0 + x * x); };
  const double x1 = std::sqrt(2.0 / E - 1.0);
  boost::math::quadrature::tanh_sinh<double> ts;

  const double s_ref = 2.0 * ts.integrate(
                                 [&](double x) {
                                   return std::sqrt(std::max(v0(x) - E, 0.0));
                                 },
                                 0.0, x1, 1e-12);
  CHECK(std::abs(d.x1 - x1) < 1e-10);
  CHECK(std::abs(d.action - s_ref) < 1e-9);

  const double Y = 3000.0;
  const double mid_ref = ts.integrate(
      [&](double x) {
        return std::sqrt(std::max(E - v0(x), 0.0)) - std::sqrt(E);
      },
      x1, Y, 1e-12);
  const double t_ref = x1 * std::sqrt(E) - (mid_ref + tail_series(E, Y));
  CHECK(std::abs(d.t_plus - t_ref) < 1e-9);
  CHECK(std::abs(d.t_minus - t_ref) < 1e-9);
}

TEST_CASE("langer variable is smooth, monotone, and anchored") {
  const PotentialModel m = folded_barrier(0.1);
  const double E = 0.5;
  const double h = 1e-3;

  std::vector<double> grid;
  for (double x = 0.0; x < 1.7; x += 0.1) grid.push_back(x);
  grid.push_back(kSqrt3 - h);
  grid.push_back(kSqrt3);
  grid.push_back(kSqrt3 + h);
  for (double x = 1.8; x < 6.0; x += 0.2) grid.push_back(x);
  grid.push_back(2.0 * kSqrt3);
  std::sort(grid.begin(), grid.end());

  const LangerChart chart = langer_variable(m, E, 0.1, grid);
  REQUIRE(chart.x.size() == grid.size());
  REQUIRE(chart.zeta.size() == grid.size());
  REQUIRE(chart.q.size() == grid.size());

  std::size_t i1 = 0;
  while (chart.x[i1] != kSqrt3) ++i1;

  SUBCASE("sign, zero, and monotonicity") {
    CHECK(std::abs(chart.zeta[i1]) < 1e-7);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (chart.x[i] < kSqrt3) CHECK(chart.zeta[i] < 0.0);
      if (chart.x[i] > kSqrt3) CHECK(chart.zeta[i] > 0.0);
      if (i > 0) CHECK(chart.zeta[i] > chart.zeta[i - 1]);
      CHECK(chart.q[i] > 0.0);
    }
  }

  SUBCASE("no kink across the turning point") {
    const double d2 =
        (chart.zeta[i1 + 1] - 2.0 * chart.zeta[i1] + chart.zeta[i1 - 1]) /
        (h * h);
    CHECK(std::abs(d2 - (-0.1747161)) < 1e-2);
  }

  SUBCASE("q tends to the curvature limit at the turning point") {
    CHECK(chart.q[i1] == doctest::Approx(kQLimitHalf).epsilon(1e-4));
    CHECK(chart.q[i1 - 1] == doctest::Approx(kQLimitHalf).epsilon(1e-3));
    CHECK(chart.q[i1 + 1] == doctest::Approx(kQLimitHalf).epsilon(1e-3));
  }

  SUBCASE("spot value away from the turning point") {
    std::size_t i2 = 0;
    while (chart.x[i2] != 2.0 * kSqrt3) ++i2;
    CHECK(chart.zeta[i2] == doctest::Approx(kZetaTwoX1).epsilon(1e-8));
  }
}

TEST_CASE("langer variable goes free far beyond the turning point") {
  const PotentialModel m = folded_barrier(0.1);
  const double E = 0.5;
  const double sE = std::sqrt(E);
  const WkbData d = action_integrals(m, E, 0.1);

  const std::vector<double> grid{10.0 * kSqrt3, 1000.0 * kSqrt3};
  const LangerChart chart = langer_variable(m, E, 0.1, grid);

  // (2/3) zeta^{3/2} = sqrt(E)(x - x1) + (x1 sqrt(E) - t_plus) + o(1)
  const double lhs0 = (2.0 / 3.0) * std::pow(chart.zeta[0], 1.5);
  const double ref0 = sE * (grid[0] - d.x1) + (d.x1 * sE - d.t_plus);
  CHECK(std::abs(lhs0 - ref0) / (sE * (grid[0] - d.x1)) < 1e-2);

  // far enough out even the raw free comparison is inside 1%
  const double lhs1 = (2.0 / 3.0) * std::pow(chart.zeta[1], 1.5);
  const double raw1 = sE * (grid[1] - d.x1);
  CHECK(std::abs(lhs1 - raw1) / raw1 < 1e-2);
}

TEST_CASE("langer grid validation") {
  const PotentialModel m = folded_barrier(0.1);
  CHECK_THROWS_AS(langer_variable(m, 0.5, 0.1, {}), ValidationError);
  CHECK_THROWS_AS(langer_variable(m, 0.5, 0.1, {-1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(langer_variable(m, 0.5, 0.1, {2.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(langer_variable(m, 0.5, 0.1, {1.0, 1.0}), ValidationError);
}

TEST_CASE("wkb transmission approaches exact scattering as hbar shrinks") {
  const PotentialModel m = PotentialModel::inverse_square_peak(2.0);

  SUBCASE("one-in-ten agreement at hbar = 0.05") {
    for (double E : {0.1, 0.3, 0.5}) {
      const WkbComparison c = wkb_vs_exact(m, E, 0.05);
      CHECK(c.rel_dev < 0.1);
      CHECK(c.abs_t_exact > 0.0);
      CHECK(c.abs_sigma11 ==
            doctest::Approx(std::exp(-action_integrals(m, E, 0.05).action /
                                     0.05))
                .epsilon(1e-12));
    }
  }

  SUBCASE("deviation shrinks along the hbar ladder") {
    std::vector<double> dev;
    for (double hbar : {0.1, 0.05, 0.025})
      dev.push_back(wkb_vs_exact(m, 0.5, hbar).rel_dev);
    CHECK(dev[1] < dev[0]);
    CHECK(dev[2] < dev[1]);
  }
}

TEST_CASE("dropping the potential correction degrades the small-energy match") {
  const PotentialModel m = PotentialModel::inverse_square_peak(2.0);

  SUBCASE("bounded deviation across three decades of energy") {
    for (double E : {1e-3, 1e-2, 1e-1}) {
      const WkbComparison c = wkb_vs_exact(m, E, 0.05);
      CHECK(c.rel_dev < 0.25);
    }
  }

  SUBCASE("uncorrected action is at least twice as far off at E = 1e-3") {
    const WkbComparison good = wkb_vs_exact(m, 1e-3, 0.1, true);
    const WkbComparison bare = wkb_vs_exact(m, 1e-3, 0.1, false);
    CHECK(bare.rel_dev >= 2.0 * good.rel_dev);
  }
}

}  // TEST_SUITE
