// Acceptance gate for the multifractal-spectrum toolkit.
//
// Each check prints exactly one PASS/FAIL line with the measured values and
// the tolerance pinned in this file; the process exits nonzero if any check
// fails.  Every random draw is seeded, so the run is fully deterministic.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "mfspec/builtin.hpp"
#include "mfspec/gibbs.hpp"
#include "mfspec/pressure.hpp"
#include "mfspec/spectrum.hpp"
#include "mfspec/system.hpp"

using namespace mfspec;

namespace {

constexpr double kLog2 = 0.6931471805599453094172321214581765680755;
// Hausdorff dimension of the three-branch systems (root of the
// one-parameter pressure, high-precision reference).
constexpr double kDim3 = 0.7583994840048077782092090863056816788166;
// Dimensions of the two-branch subsystems carrying the extreme exponents:
// roots of 2^-t + 12^-t = 1 and 6^-t + 12^-t = 1.
constexpr double kDimLow = 0.4965173325451845005474447018625458712514;
constexpr double kDimHigh = 0.3271526121275359062246206812314733622794;

int g_failed = 0;

__attribute__((format(printf, 1, 2))) std::string fmt(const char* f, ...) {
  char buf[768];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %-26s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

template <class Fn>
void guarded(const char* name, Fn&& fn) {
  try {
    fn(name);
  } catch (const std::exception& e) {
    report(name, false, fmt("unexpected exception: %s", e.what()));
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

SystemSpec golden_chain() {
  SystemSpec spec;
  spec.ratios = {0.4, 0.3};
  spec.incidence = {{1, 1}, {1, 0}};
  return spec;
}

PotentialFamily golden_family() {
  PotentialFamily fam;
  fam.values = {1.0, 2.5};
  fam.lower_bound = 1.0;
  fam.bounded = true;
  return fam;
}

// ---------------------------------------------------------------------------
// 01: the computed spectrum of the dyadic model matches its closed form at
// 1000 exponents spanning deep into the unbounded right tail.
// ---------------------------------------------------------------------------
void check_dyadic_curve(const char* name) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto b = make_builtin("dyadic_luroth", 200);
  const auto oracle = closed_form_oracle("dyadic_luroth");
  const auto range = exponent_range(b.system, b.family);
  GridSpec grid;
  grid.count = 1000;
  grid.xi_lo = kLog2 + 1e-3;
  grid.xi_hi = 10.0;
  const auto curve = sample_spectrum(b.system, b.family, range, grid);
  double worst = 0.0;
  for (const auto& p : curve.points)
    if (p.ok()) worst = std::max(worst, std::abs(p.t - oracle.t_of(p.xi)));
  const double wall = seconds_since(t0);
  const bool ok = curve.n_failed == 0 && worst <= 1e-8 && wall < 5.0;
  report(name, ok,
         fmt("1000 exponents in [log2+1e-3, 10]: max|t - t_exact| = %.3g "
             "(tol 1e-8), failed = %zu, wall = %.2fs (limit 5s)",
             worst, curve.n_failed, wall));
}

// ---------------------------------------------------------------------------
// 02: landmark quantities of the dyadic model hit their exact values.
// ---------------------------------------------------------------------------
void check_dyadic_landmarks(const char* name) {
  const auto b = make_builtin("dyadic_luroth", 200);
  const auto range = exponent_range(b.system, b.family);
  const auto peak = outer_solve_t(b.system, b.family, range, range.xi_zero);
  const double dh = std::abs(range.h - 1.0);
  const double dth = std::abs(range.theta - 0.0);
  const double dmin = std::abs(range.xi_min - kLog2);
  const double dzero = std::abs(range.xi_zero - 2.0 * kLog2);
  const double dpeak = std::abs(peak.t - 1.0);
  const bool ok = dh <= 1e-8 && dth <= 1e-6 && dmin <= 1e-6 &&
                  dzero <= 1e-8 && peak.ok() && dpeak <= 1e-8;
  report(name, ok,
         fmt("|h-1| = %.3g (1e-8), |theta| = %.3g (1e-6), |xi_min-log2| = "
             "%.3g (1e-6), |xi_zero-2log2| = %.3g (1e-8), |t(xi_zero)-1| = "
             "%.3g (1e-8)",
             dh, dth, dmin, dzero, dpeak));
}

// ---------------------------------------------------------------------------
// 03: the 10000-branch continued-fraction model classifies correctly: the
// series abscissa sits at 1/2, the system is regular with dimension 1, and
// the exponent range is [log2, inf).
// ---------------------------------------------------------------------------
void check_gauss_classification(const char* name) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto b = make_builtin("linearized_gauss", 10000);
  const auto rep = regularity_report(b.system);
  const auto range = exponent_range(b.system, b.family);
  const double wall = seconds_since(t0);
  const double dth = std::abs(rep.theta - 0.5);
  const double dh = std::abs(rep.h - 1.0);
  const double dmin = std::abs(range.xi_min - kLog2);
  const bool ok = dth <= 1e-3 && rep.cofinitely_regular && rep.regular &&
                  dh <= 1e-3 && dmin <= 1e-9 && std::isinf(range.xi_max) &&
                  wall < 10.0;
  report(name, ok,
         fmt("|theta-1/2| = %.3g (1e-3), cofinitely_regular = %d, |h-1| = "
             "%.3g (1e-3), |xi_min-log2| = %.3g (1e-9), xi_max = %s, wall = "
             "%.2fs (limit 10s)",
             dth, rep.cofinitely_regular ? 1 : 0, dh, dmin,
             format_g17(range.xi_max).c_str(), wall));
}

// ---------------------------------------------------------------------------
// 04: pressure surface of both three-branch models against the closed-form
// two-group formula at 200 random points each, plus the exponent extremes.
// ---------------------------------------------------------------------------
void check_three_branch_pressure(const char* name) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ut(-0.5, 1.5);
  std::uniform_real_distribution<double> uq(-3.0, 1.5);
  double worst_p = 0.0, worst_d = 0.0, worst_r = 0.0;
  for (const char* model : {"three_branch_121", "three_branch_122"}) {
    const auto b = make_builtin(model, {});
    const auto oracle = closed_form_oracle(model);
    for (int i = 0; i < 200; ++i) {
      const double t = ut(rng), q = uq(rng);
      const auto p = pressure(b.system, b.family, t, q);
      worst_p = std::max(worst_p, std::abs(p.value - oracle.pressure(t, q)));
      worst_d = std::max(worst_d, std::abs(p.dp_dq - oracle.dp_dq(t, q)));
    }
    const auto range = exponent_range(b.system, b.family);
    worst_r = std::max({worst_r, std::abs(range.xi_min - 1.0),
                        std::abs(range.xi_max - 2.0)});
  }
  const bool ok = worst_p <= 1e-10 && worst_d <= 1e-10 && worst_r <= 1e-6;
  report(name, ok,
         fmt("400 random (t,q): max|P - P_exact| = %.3g (1e-10), "
             "max|dP/dq - exact| = %.3g (1e-10), exponent extremes off by "
             "%.3g (1e-6)",
             worst_p, worst_d, worst_r));
}

// ---------------------------------------------------------------------------
// 05: the monotone inner solver recovers the exact q(t, xi) of the
// three-branch model at 100 random targets.
// ---------------------------------------------------------------------------
void check_inner_solver(const char* name) {
  const auto b = make_builtin("three_branch_121", {});
  const auto oracle = closed_form_oracle("three_branch_121");
  std::mt19937 rng(22);
  std::uniform_real_distribution<double> ut(0.05, 0.75);
  std::uniform_real_distribution<double> uxi(1.05, 1.95);
  double worst = 0.0;
  int solved = 0;
  for (int i = 0; i < 100; ++i) {
    const double t = ut(rng), xi = uxi(rng);
    const auto is = inner_solve_q(b.system, b.family, t, xi);
    if (is.ok && !is.clamped) ++solved;
    worst = std::max(worst, std::abs(is.q - oracle.q_of(t, xi)));
  }
  const bool ok = solved == 100 && worst <= 1e-9;
  report(name, ok,
         fmt("100 random (t, xi): solved = %d/100, max|q - q_exact| = %.3g "
             "(tol 1e-9)",
             solved, worst));
}

// ---------------------------------------------------------------------------
// 06: qualitative shape of the spectrum: rises to the peak (h at xi_zero),
// falls after, concave at the peak; the unbounded dyadic model additionally
// shows the concave-to-convex switch right of the peak and deep q values.
// ---------------------------------------------------------------------------
void check_spectrum_shape(const char* name) {
  bool ok = true;
  std::string detail;
  for (const char* model : {"three_branch_121", "three_branch_122"}) {
    const auto b = make_builtin(model, {});
    const auto range = exponent_range(b.system, b.family);
    const auto curve = sample_spectrum(b.system, b.family, range);
    const auto rep = shape_diagnostics(curve);
    ok = ok && rep.ok && !rep.inflection_applicable &&
         std::abs(rep.peak_t - kDim3) <= 1e-8;
    detail += fmt("%s: shape_ok = %d, |peak_t - dim| = %.2g; ", model,
                  rep.ok ? 1 : 0, std::abs(rep.peak_t - kDim3));
  }
  const auto b3 = make_builtin("dyadic_luroth", 100);
  const auto range3 = exponent_range(b3.system, b3.family);
  GridSpec grid;
  grid.count = 301;
  grid.xi_lo = kLog2 + 1e-3;
  grid.xi_hi = 10.0;
  const auto curve3 = sample_spectrum(b3.system, b3.family, range3, grid);
  const auto rep3 = shape_diagnostics(curve3);
  ok = ok && rep3.ok && rep3.inflection_applicable && rep3.inflection_right &&
       rep3.deep_q_witness;
  detail += fmt(
      "dyadic_luroth: shape_ok = %d, inflection_right = %d, deep_q = %d, "
      "min_q = %.3g",
      rep3.ok ? 1 : 0, rep3.inflection_right ? 1 : 0,
      rep3.deep_q_witness ? 1 : 0, rep3.min_q);
  report(name, ok, detail);
}

// ---------------------------------------------------------------------------
// 07: equilibrium-state consistency on four models: analytic gradient vs
// central differences, the variational identity, dP/dq vs the state's mean
// exponent, and dimension inside [0, h].
// ---------------------------------------------------------------------------
void check_gibbs_consistency(const char* name) {
  struct Case {
    const char* label;
    BuiltinSystem b;
    double t_lo, t_hi;
    double q_lo, q_hi;  // via_u: bounds on u = t - q instead of q
    bool via_u;
  };
  const std::vector<Case> cases = {
      {"three_branch_121", make_builtin("three_branch_121", {}), 0.05, 1.2, -2.0, 0.8,
       false},
      {"three_branch_122", make_builtin("three_branch_122", {}), 0.05, 1.2, -2.0, 0.8,
       false},
      {"dyadic_luroth", make_builtin("dyadic_luroth", 150), 0.35, 1.4, 0.3, 1.5,
       true},
      {"linearized_gauss", make_builtin("linearized_gauss", 3000), 0.8, 1.6,
       0.75, 1.6, true},
  };
  std::mt19937 rng(33);
  double worst_fd = 0.0, worst_var = 0.0, worst_link = 0.0;
  bool dims_ok = true;
  const double step = 1e-6;
  for (const auto& c : cases) {
    const double h = bowen_parameter(c.b.system);
    std::uniform_real_distribution<double> ut(c.t_lo, c.t_hi);
    std::uniform_real_distribution<double> u2(c.q_lo, c.q_hi);
    for (int i = 0; i < 50; ++i) {
      const double t = ut(rng);
      const double q = c.via_u ? t - u2(rng) : u2(rng);
      const auto [dt, dq] = pressure_grad(c.b.system, c.b.family, t, q);
      const double fd_t = (pressure_value(c.b.system, c.b.family, t + step, q) -
                           pressure_value(c.b.system, c.b.family, t - step, q)) /
                          (2.0 * step);
      const double fd_q = (pressure_value(c.b.system, c.b.family, t, q + step) -
                           pressure_value(c.b.system, c.b.family, t, q - step)) /
                          (2.0 * step);
      worst_fd = std::max({worst_fd, std::abs(dt - fd_t), std::abs(dq - fd_q)});
      worst_var = std::max(worst_var,
                           variational_check(c.b.system, c.b.family, t, q));
      const auto st = gibbs_state(c.b.system, c.b.family, t, q);
      worst_link = std::max(worst_link, std::abs(dq - st.f_exponent));
      dims_ok = dims_ok && st.dimension >= 0.0 && st.dimension <= h + 1e-9;
    }
  }
  const bool ok =
      worst_fd <= 1e-6 && worst_var <= 1e-8 && worst_link <= 1e-8 && dims_ok;
  report(name, ok,
         fmt("200 random states on 4 models: max|grad - FD| = %.3g (1e-6), "
             "max variational residual = %.3g (1e-8), max|dP/dq - mean f| = "
             "%.3g (1e-8), dimensions in [0, h] = %d",
             worst_fd, worst_var, worst_link, dims_ok ? 1 : 0));
}

// ---------------------------------------------------------------------------
// 08: freezing limit q -> -inf: the state's mean exponent decreases to the
// minimal exponent of the alphabet.
// ---------------------------------------------------------------------------
void check_freezing_limit(const char* name) {
  const auto b = make_builtin("three_branch_121", {});
  std::vector<double> qs;
  for (int k = 0; k <= 20; ++k) qs.push_back(-2.0 * k);
  bool monotone = true, converged = true, clamped = false;
  double worst_gap = 0.0;
  for (const double t : {0.0, 0.3, kDim3}) {
    const auto trace = zero_temperature_limit(b.system, b.family, t, qs);
    clamped = clamped || trace.clamped;
    for (std::size_t i = 1; i < trace.points.size(); ++i) {
      if (trace.points[i].f_exponent >
          trace.points[i - 1].f_exponent + 1e-12)
        monotone = false;
    }
    const double gap = std::abs(trace.points.back().f_exponent - 1.0);
    worst_gap = std::max(worst_gap, gap);
    converged = converged && gap <= 1e-6;
  }
  const bool ok = monotone && converged && !clamped;
  report(name, ok,
         fmt("q = 0, -2, ..., -40 at three t: mean exponent non-increasing = "
             "%d, final gap to min f = %.3g (tol 1e-6), clamped = %d",
             monotone ? 1 : 0, worst_gap, clamped ? 1 : 0));
}

// ---------------------------------------------------------------------------
// 09: near the endpoint exponents the spectrum approaches the dimension of
// the subsystem carrying that exponent.
// ---------------------------------------------------------------------------
void check_endpoint_subsystems(const char* name) {
  const auto b1 = make_builtin("three_branch_121", {});
  const auto r1 = exponent_range(b1.system, b1.family);
  const auto p1 = outer_solve_t(b1.system, b1.family, r1, 1.0 + 1e-3);
  const double d1 = std::abs(p1.t - kDimLow);

  const auto b2 = make_builtin("three_branch_122", {});
  const auto r2 = exponent_range(b2.system, b2.family);
  const auto p2 = outer_solve_t(b2.system, b2.family, r2, 2.0 - 1e-3);
  const double d2 = std::abs(p2.t - kDimHigh);

  const bool ok = p1.ok() && p2.ok() && d1 <= 1e-2 && d2 <= 1e-2;
  report(name, ok,
         fmt("|t(xi_min + 1e-3) - dim_low| = %.3g, |t(xi_max - 1e-3) - "
             "dim_high| = %.3g (tol 1e-2 at offset 1e-3)",
             d1, d2));
}

// ---------------------------------------------------------------------------
// 10: translating the potential family translates the spectrum: t_{f+a}(xi+a)
// equals t_f(xi), each side solved from scratch.
// ---------------------------------------------------------------------------
void check_translation_invariance(const char* name) {
  const auto b1 = make_builtin("three_branch_121", {});
  const std::vector<double> xis1 = {1.1, 1.25, 1.6, 1.9};
  double worst = 0.0;
  for (const double a : {-1.0, 0.5}) {
    worst = std::max(
        worst, translation_invariance_check(b1.system, b1.family, a, xis1));
  }
  const auto b3 = make_builtin("dyadic_luroth", 100);
  const std::vector<double> xis3 = {0.9, 1.2, 2.0 * kLog2, 2.0, 3.0, 5.0};
  worst = std::max(worst, translation_invariance_check(b3.system, b3.family,
                                                       0.5, xis3));
  const bool ok = worst <= 1e-8;
  report(name, ok,
         fmt("three shifted families, 14 exponents: max|t_f(xi) - "
             "t_{f+a}(xi+a)| = %.3g (tol 1e-8)",
             worst));
}

// ---------------------------------------------------------------------------
// 11: the cylinder-weight bounds behind the Gibbs property: ratios of
// cylinder measures to their defining weights stay in a positive finite
// band; for product states the band collapses to exactly 1.
// ---------------------------------------------------------------------------
void check_cylinder_bands(const char* name) {
  const auto golden = golden_chain();
  const auto gfam = golden_family();
  const auto band = gibbs_inequality_check(golden, gfam, 0.5, -0.3, 6);
  const bool markov_ok = band.c_min > 0.0 && std::isfinite(band.c_max) &&
                         band.c_min <= 1.0 + 1e-12 &&
                         band.c_max >= 1.0 - 1e-12;

  const auto b = make_builtin("three_branch_121", {});
  const auto prod = gibbs_inequality_check(b.system, b.family, 0.3, -0.7, 6);
  const double dev = std::max(std::abs(prod.c_min - 1.0),
                              std::abs(prod.c_max - 1.0));
  const bool ok = markov_ok && dev <= 1e-12;
  report(name, ok,
         fmt("chain words (len 6): band [%.6g, %.6g] contains 1 = %d; "
             "product words: max|C - 1| = %.3g (tol 1e-12, %zu words)",
             band.c_min, band.c_max, markov_ok ? 1 : 0, dev,
             prod.words_checked));
}

}  // namespace

int main() {
  std::printf("acceptance gate: multifractal spectrum toolkit\n");
  guarded("01_dyadic_curve", check_dyadic_curve);
  guarded("02_dyadic_landmarks", check_dyadic_landmarks);
  guarded("03_gauss_classification", check_gauss_classification);
  guarded("04_three_branch_pressure", check_three_branch_pressure);
  guarded("05_inner_solver", check_inner_solver);
  guarded("06_spectrum_shape", check_spectrum_shape);
  guarded("07_gibbs_consistency", check_gibbs_consistency);
  guarded("08_freezing_limit", check_freezing_limit);
  guarded("09_endpoint_subsystems", check_endpoint_subsystems);
  guarded("10_translation_invariance", check_translation_invariance);
  guarded("11_cylinder_bands", check_cylinder_bands);
  if (g_failed == 0) {
    std::printf("acceptance gate: all 11 checks passed\n");
    return 0;
  }
  std::printf("acceptance gate: %d check(s) FAILED\n", g_failed);
  return 1;
}
