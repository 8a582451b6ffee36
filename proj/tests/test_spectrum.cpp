// Exponent-range detection and the two-level spectrum solver: inner slope
// matching, outer root finding, grids, shape diagnostics, invariances.
//
// Reference decimals marked "40-digit value" were computed independently
// with mpmath at 40 significant digits and rounded to double.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mfspec/builtin.hpp"
#include "mfspec/spectrum.hpp"

using namespace mfspec;

namespace {

constexpr double kDim3B = 0.7583994840048077782092090863056816788166;
constexpr double kXiZero121 = 1.256951107102451620980114238001338036642;

SystemSpec golden() {
  SystemSpec s;
  s.ratios = {0.4, 0.3};
  s.incidence = {{1, 1}, {1, 0}};
  return s;
}

PotentialFamily golden_family() {
  PotentialFamily fam;
  fam.values = {1.0, 2.5};
  fam.bounded = true;
  fam.lower_bound = 1.0;
  return fam;
}

}  // namespace

TEST_CASE("attainable exponent range of the three-branch systems") {
  const auto b = three_branch_121();
  const auto r = exponent_range(b.system, b.family);
  CHECK(r.xi_min == Catch::Approx(1.0).margin(1e-9));
  CHECK(r.xi_max == Catch::Approx(2.0).margin(1e-9));
  CHECK(r.h == Catch::Approx(kDim3B).margin(1e-12));
  CHECK(r.xi_zero == Catch::Approx(kXiZero121).margin(1e-12));
  CHECK(std::isinf(r.theta));
  CHECK_FALSE(r.degenerate);
  CHECK(r.xi_min < r.xi_zero);
  CHECK(r.xi_zero < r.xi_max);
}

TEST_CASE("unbounded weights leave the range open above") {
  const auto b = dyadic_luroth(120);
  const auto r = exponent_range(b.system, b.family);
  CHECK(r.xi_min == Catch::Approx(std::log(2.0)).margin(1e-9));
  CHECK(std::isinf(r.xi_max));
  CHECK(r.xi_zero == Catch::Approx(2.0 * std::log(2.0)).margin(1e-10));
  CHECK(r.h == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("a single cycle mean makes the range degenerate") {
  SystemSpec s;
  s.ratios = {0.5, 0.25};
  s.incidence = {{0, 1}, {1, 0}};  // only the 2-cycle exists
  PotentialFamily fam;
  fam.values = {1.0, 2.0};
  fam.bounded = true;
  fam.lower_bound = 1.0;
  const auto r = exponent_range(s, fam);
  CHECK(r.degenerate);
  CHECK(r.xi_min == Catch::Approx(1.5));
  CHECK(r.xi_max == Catch::Approx(1.5));
  CHECK_THROWS_AS(sample_spectrum(s, fam, r, GridSpec{}), ValidationError);
}

TEST_CASE("range detection cross-checks the freezing slope") {
  // A shallow probe depth leaves the slope far from the true minimum; the
  // failure must surface as a solver error naming both numbers.
  const auto b = three_branch_121();
  CHECK_THROWS_AS(exponent_range(b.system, b.family, -0.5), SolverError);
  try {
    exponent_range(b.system, b.family, -0.5);
  } catch (const SolverError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("cycle") != std::string::npos);
  }
}

TEST_CASE("inner solve matches the closed-form branch weight") {
  const auto b = three_branch_121();
  // 40-digit value of q solving dP/dq(0.5, q) = 1.25.
  const auto s = inner_solve_q(b.system, b.family, 0.5, 1.25, {});
  REQUIRE(s.ok);
  CHECK(s.q == Catch::Approx(-0.2069595594857496068282214962877864811902)
                   .margin(1e-10));
  CHECK(s.dp_dq == Catch::Approx(1.25).margin(1e-10));

  const auto oracle = closed_form_oracle("three_branch_122");
  const auto b2 = three_branch_122();
  for (double t : {0.1, 0.4, 0.7}) {
    for (double xi : {1.1, 1.5, 1.9}) {
      const auto sol = inner_solve_q(b2.system, b2.family, t, xi, {});
      REQUIRE(sol.ok);
      CHECK(sol.q == Catch::Approx(oracle.q_of(t, xi)).margin(1e-9));
    }
  }
}

TEST_CASE("outer solve reproduces the closed-form spectrum") {
  const auto b = three_branch_121();
  const auto r = exponent_range(b.system, b.family);
  const auto oracle = closed_form_oracle("three_branch_121");
  for (double xi : {1.05, 1.2, kXiZero121, 1.6, 1.9}) {
    const auto pt = outer_solve_t(b.system, b.family, r, xi, {});
    REQUIRE(pt.ok());
    CHECK(pt.t == Catch::Approx(oracle.t_of(xi)).margin(1e-10));
    CHECK(std::abs(pt.residual_w) < 1e-10);
    CHECK(std::abs(pt.residual_grad) < 1e-9);
  }
  // At the balance exponent the curve touches its maximum t = h.
  const auto peak = outer_solve_t(b.system, b.family, r, r.xi_zero, {});
  CHECK(peak.t == Catch::Approx(r.h).margin(1e-10));
  CHECK(peak.q == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("the spectrum root is unique within random sub-brackets") {
  const auto b = three_branch_122();
  const auto r = exponent_range(b.system, b.family);
  const double xi = 1.37;
  const auto ref = outer_solve_t(b.system, b.family, r, xi, {});
  REQUIRE(ref.ok());
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> lo_d(0.0, ref.t),
      hi_d(ref.t, r.h);
  for (int i = 0; i < 50; ++i) {
    OuterOptions opts;
    const double lo = lo_d(rng), hi = hi_d(rng);
    if (hi - lo < 1e-6) continue;
    opts.t_bracket = std::make_pair(lo, hi);
    const auto pt = outer_solve_t(b.system, b.family, r, xi, opts);
    REQUIRE(pt.ok());
    CHECK(pt.t == Catch::Approx(ref.t).margin(1e-9));
  }
}

TEST_CASE("explicit brackets are validated") {
  const auto b = three_branch_121();
  const auto r = exponent_range(b.system, b.family);
  OuterOptions opts;
  opts.t_bracket = std::make_pair(0.7, 0.2);
  CHECK_THROWS_AS(outer_solve_t(b.system, b.family, r, 1.3, opts),
                  ValidationError);
}

TEST_CASE("exponents outside the attainable range are rejected") {
  const auto b = three_branch_121();
  const auto r = exponent_range(b.system, b.family);
  for (double xi : {0.5, 1.0, 2.0, 2.5}) {  // endpoints are open
    GridSpec grid;
    grid.count = 5;
    grid.xi_lo = xi;
    grid.xi_hi = xi + 0.0625;
    CHECK_THROWS_AS(sample_spectrum(b.system, b.family, r, grid),
                    ValidationError);
  }
}

TEST_CASE("grid pins the balance exponent to a node") {
  const auto b = three_branch_121();
  const auto r = exponent_range(b.system, b.family);
  GridSpec grid;
  grid.count = 33;
  const auto curve = sample_spectrum(b.system, b.family, r, grid);
  REQUIRE(curve.points.size() == 33);
  CHECK(curve.n_failed == 0);
  bool has_xi_zero = false;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].xi > curve.points[i - 1].xi);
    if (curve.points[i].xi == r.xi_zero) has_xi_zero = true;
  }
  CHECK(has_xi_zero);
}

TEST_CASE("ratio-linked fast path agrees with the general solver") {
  const auto b = dyadic_luroth(80);
  GridSpec grid;
  grid.count = 41;
  grid.xi_lo = std::log(2.0) + 1e-3;
  grid.xi_hi = 6.0;
  const auto fast = lyapunov_spectrum(b.system, grid);
  const auto general = sample_spectrum(b.system, b.family, grid);
  REQUIRE(fast.points.size() == general.points.size());
  REQUIRE(fast.n_failed == 0);
  REQUIRE(general.n_failed == 0);
  const auto oracle = closed_form_oracle("dyadic_luroth");
  for (std::size_t i = 0; i < fast.points.size(); ++i) {
    CHECK(fast.points[i].xi == general.points[i].xi);
    CHECK(fast.points[i].t ==
          Catch::Approx(general.points[i].t).margin(1e-9));
    CHECK(fast.points[i].t ==
          Catch::Approx(oracle.t_of(fast.points[i].xi)).margin(1e-8));
  }
}

TEST_CASE("shape diagnostics on a healthy curve") {
  const auto b = three_branch_122();
  const auto r = exponent_range(b.system, b.family);
  GridSpec grid;
  grid.count = 201;
  const auto curve = sample_spectrum(b.system, b.family, r, grid);
  const auto rep = shape_diagnostics(curve);
  CHECK(rep.ok);
  CHECK(rep.all_points_ok);
  CHECK(rep.q_signs_ok);
  CHECK(rep.rising_left);
  CHECK(rep.falling_right);
  CHECK(rep.peak_at_xi_zero);
  CHECK(rep.concave_at_peak);
  CHECK_FALSE(rep.inflection_applicable);  // bounded exponent range
  CHECK(rep.peak_xi == Catch::Approx(r.xi_zero));
  CHECK(rep.peak_t == Catch::Approx(r.h).margin(1e-6));
  CHECK(rep.d2_at_peak < 0.0);
  CHECK(rep.min_q < 0.0);
  CHECK(rep.max_q > 0.0);
}

TEST_CASE("unbounded ranges show the convex far tail") {
  const auto b = dyadic_luroth(100);
  GridSpec grid;
  grid.count = 301;
  grid.xi_lo = std::log(2.0) + 1e-3;
  grid.xi_hi = 10.0;
  const auto curve = sample_spectrum(b.system, b.family, grid);
  const auto rep = shape_diagnostics(curve);
  CHECK(rep.ok);
  REQUIRE(rep.inflection_applicable);
  CHECK(rep.inflection_right);
  CHECK(rep.deep_q_witness);  // branch weights below -2 near the left edge
  CHECK(rep.min_q < -2.0);
}

TEST_CASE("shape diagnostics need at least three points") {
  SpectrumCurve curve;
  curve.points.resize(2);
  CHECK_THROWS_AS(shape_diagnostics(curve), ValidationError);
}

TEST_CASE("chain systems solve and shape-check end to end") {
  const auto s = golden();
  const auto fam = golden_family();
  const auto r = exponent_range(s, fam);
  CHECK(r.xi_min == Catch::Approx(1.0).margin(1e-9));
  CHECK(r.xi_max == Catch::Approx(1.75).margin(1e-9));
  GridSpec grid;
  grid.count = 101;
  const auto curve = sample_spectrum(s, fam, r, grid);
  CHECK(curve.n_failed == 0);
  const auto rep = shape_diagnostics(curve);
  CHECK(rep.ok);
  CHECK(rep.peak_t == Catch::Approx(r.h).margin(1e-6));
}

TEST_CASE("constant weight shifts leave the spectrum invariant") {
  const auto b = three_branch_121();
  for (double a : {-1.0, 0.5}) {
    const double worst = translation_invariance_check(
        b.system, b.family, a, {1.1, kXiZero121, 1.6, 1.9});
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("stored-alphabet support caps the default window") {
  // With a slowly decaying tail the stored symbols cannot certify very
  // large exponents; the default window must stay inside the supportable
  // part and solve everywhere.
  const auto b = linearized_gauss(2000);
  GridSpec grid;
  grid.count = 41;
  const auto curve = sample_spectrum(b.system, b.family, grid);
  CHECK(curve.n_failed == 0);
  CHECK(curve.points.back().xi < 10.0);
  // An explicit window beyond the support fails honestly instead.
  GridSpec wide;
  wide.count = 5;
  wide.xi_lo = 9.0;
  wide.xi_hi = 12.0;
  const auto hard = sample_spectrum(b.system, b.family, wide);
  CHECK(hard.n_failed > 0);
}
