// Two-parameter topological pressure for the potential t log|Phi'| + q F
// with a depth-1 locally constant family F.  Full shifts reduce to the
// weighted one-symbol sum; Markov systems to the log spectral radius of the
// weighted incidence matrix.  Also: the finiteness parameter (left edge of
// the convergence strip), the Bowen parameter (pressure zero), the
// convergence-region boundary in the (t,q) plane, and the boundary blow-up
// probe.
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "perron.hpp"
#include "series.hpp"
#include "system.hpp"

namespace mfspec {

// ---------------------------------------------------------------------------
// One-symbol weighted sum Z(t,q) = sum_e r_e^t exp(q f_e).
// `finite` is the divergence marker; the linear value is derived, so the
// marker never depends on floating-point overflow.
// ---------------------------------------------------------------------------
struct ZTildeValue {
  bool finite = false;
  double log_value = kPosInf;
  double tail_error = 0.0;
  double value() const { return finite ? std::exp(log_value) : kPosInf; }
};

inline ZTildeValue z_tilde_1(const SystemSpec& spec, const PotentialFamily& fam,
                             double t, double q) {
  const auto s = detail::evaluate_series(spec, fam, t, q, false);
  return {s.finite, s.log_z, s.tail_error};
}

// ---------------------------------------------------------------------------
// Pressure evaluation.
// ---------------------------------------------------------------------------
struct PressurePoint {
  double t = 0.0, q = 0.0;
  bool in_region = false;
  double value = kPosInf;      // +inf marker outside the region
  double dp_dt = kNaN;         // strictly negative inside the region
  double dp_dq = kNaN;         // strictly positive inside the region
  double d2_tt = kNaN, d2_tq = kNaN, d2_qq = kNaN;  // PSD Hessian
  double tail_error = 0.0;
};

namespace detail {

enum class EvalLevel { value, grad, hess };

struct PressureEval {
  bool finite = false;
  double value = kPosInf;
  double dt = kNaN, dq = kNaN;
  double dtt = kNaN, dtq = kNaN, dqq = kNaN;
  double tail_error = 0.0;
};

inline PressureEval eval_markov(const SystemSpec& spec,
                                const PotentialFamily& fam,
                                const std::vector<double>& lr, double t,
                                double q, EvalLevel level);

inline PressureEval eval_pressure(const SystemSpec& spec,
                                  const PotentialFamily& fam,
                                  const std::vector<double>& lr, double t,
                                  double q, EvalLevel level) {
  if (!spec.full_shift()) return eval_markov(spec, fam, lr, t, q, level);
  const auto s = evaluate_series(spec, fam, lr, t, q, level == EvalLevel::hess);
  PressureEval out;
  out.finite = s.finite;
  if (!s.finite) return out;
  out.value = s.log_z;
  out.tail_error = s.tail_error;
  out.dt = s.mean_lr;
  out.dq = s.mean_f;
  if (level == EvalLevel::hess) {
    out.dtt = s.var_lr;
    out.dtq = s.cov_lrf;
    out.dqq = s.var_f;
  }
  return out;
}

inline PressureEval eval_markov(const SystemSpec& spec,
                                const PotentialFamily& fam,
                                const std::vector<double>& lr, double t,
                                double q, EvalLevel level) {
  const std::size_t n = spec.size();
  auto grad_at = [&](double tt, double qq, double* dt, double* dq) {
    std::vector<double> g(n);
    for (std::size_t a = 0; a < n; ++a)
      g[a] = tt * lr[a] + qq * fam.values[a];
    const auto pr = perron_power_iteration(spec, g);
    double sum = 0.0, sdt = 0.0, sdq = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      const double pa = pr.left[a] * pr.right[a];
      sum += pa;
      sdt += pa * lr[a];
      sdq += pa * fam.values[a];
    }
    if (dt) *dt = sdt / sum;
    if (dq) *dq = sdq / sum;
    return pr.log_rho;
  };
  PressureEval out;
  out.finite = true;
  if (level == EvalLevel::value) {
    std::vector<double> g(n);
    for (std::size_t a = 0; a < n; ++a)
      g[a] = t * lr[a] + q * fam.values[a];
    out.value = perron_power_iteration(spec, g).log_rho;
    return out;
  }
  out.value = grad_at(t, q, &out.dt, &out.dq);
  if (level == EvalLevel::hess) {
    // Central differences of the analytic gradient.
    const double step = 1e-5;
    double dt_p, dq_p, dt_m, dq_m;
    grad_at(t + step, q, &dt_p, &dq_p);
    grad_at(t - step, q, &dt_m, &dq_m);
    out.dtt = (dt_p - dt_m) / (2.0 * step);
    const double dtq_a = (dq_p - dq_m) / (2.0 * step);
    grad_at(t, q + step, &dt_p, &dq_p);
    grad_at(t, q - step, &dt_m, &dq_m);
    out.dqq = (dq_p - dq_m) / (2.0 * step);
    const double dtq_b = (dt_p - dt_m) / (2.0 * step);
    out.dtq = 0.5 * (dtq_a + dtq_b);
  }
  return out;
}

// Internal family used when only the ratios matter (q = 0 callers).
inline PotentialFamily ratio_only_family(const SystemSpec& spec) {
  return lyapunov_family(spec);
}

}  // namespace detail

inline PressurePoint pressure(const SystemSpec& spec,
                              const PotentialFamily& fam, double t, double q) {
  const auto lr = detail::log_ratios(spec);
  const auto e =
      detail::eval_pressure(spec, fam, lr, t, q, detail::EvalLevel::hess);
  PressurePoint p;
  p.t = t;
  p.q = q;
  p.in_region = e.finite;
  if (!e.finite) return p;
  p.value = e.value;
  p.dp_dt = e.dt;
  p.dp_dq = e.dq;
  p.d2_tt = e.dtt;
  p.d2_tq = e.dtq;
  p.d2_qq = e.dqq;
  p.tail_error = e.tail_error;
  return p;
}

inline double pressure_value(const SystemSpec& spec, const PotentialFamily& fam,
                             double t, double q) {
  const auto e = detail::eval_pressure(spec, fam, detail::log_ratios(spec), t,
                                       q, detail::EvalLevel::value);
  return e.finite ? e.value : kPosInf;
}

inline std::pair<double, double> pressure_grad(const SystemSpec& spec,
                                               const PotentialFamily& fam,
                                               double t, double q) {
  const auto e = detail::eval_pressure(spec, fam, detail::log_ratios(spec), t,
                                       q, detail::EvalLevel::grad);
  if (!e.finite)
    throw SolverError("pressure gradient requested outside the finite region");
  return {e.dt, e.dq};
}

inline std::array<double, 3> pressure_hessian(const SystemSpec& spec,
                                              const PotentialFamily& fam,
                                              double t, double q) {
  const auto e = detail::eval_pressure(spec, fam, detail::log_ratios(spec), t,
                                       q, detail::EvalLevel::hess);
  if (!e.finite)
    throw SolverError("pressure Hessian requested outside the finite region");
  return {e.dtt, e.dtq, e.dqq};
}

// ---------------------------------------------------------------------------
// finiteness_parameter: left edge theta of {t : Z(t,0) < inf}.  Finite
// alphabets converge everywhere (-inf marker); truncated infinite alphabets
// are classified through the declared tail model, located by bisection on
// the divergence predicate.
// ---------------------------------------------------------------------------
inline double finiteness_parameter(const SystemSpec& spec) {
  if (!spec.infinite) return kNegInf;
  // The stored alphabet is finite, so only the declared tail decides where
  // the weighted series starts converging: geometric tails converge for
  // every positive exponent, power-law tails of exponent p beyond 1/p.
  // Both profiles diverge at the abscissa itself.
  return spec.tail.kind == TailKind::geometric ? 0.0 : 1.0 / spec.tail.p;
}

// ---------------------------------------------------------------------------
// bowen_parameter: the unique zero of t -> P(t,0) when it exists (the
// Hausdorff dimension of the limit set).  Throws for irregular systems
// whose pressure never reaches zero from above.
// ---------------------------------------------------------------------------
inline double bowen_parameter(const SystemSpec& spec) {
  const auto fam = detail::ratio_only_family(spec);
  const auto lr = detail::log_ratios(spec);
  auto p0 = [&](double t) {
    const auto e =
        detail::eval_pressure(spec, fam, lr, t, 0.0, detail::EvalLevel::value);
    return e.finite ? e.value : kPosInf;
  };
  const double theta = finiteness_parameter(spec);
  double lo;
  if (spec.infinite) {
    lo = theta + std::max(1e-9, std::abs(theta) * 1e-12);
    const double plo = p0(lo);
    if (!(plo >= 0.0)) {
      throw SolverError(
          "no zero of pressure on (theta, inf): P(theta+) = " +
          format_g17(plo) + " < 0 (irregular system)");
    }
  } else {
    lo = 0.0;  // P(0,0) = log(spectral radius of incidence) >= 0
    const double plo = p0(lo);
    if (plo == 0.0) return 0.0;
    if (plo < 0.0) {
      throw SolverError("no zero of pressure: P(0,0) = " + format_g17(plo) +
                        " < 0");
    }
  }
  double hi = std::max(lo + 1.0, 1.0);
  while (p0(hi) > 0.0) hi = lo + (hi - lo) * 2.0;
  return detail::bisect([&](double t) { return p0(t); }, lo, hi, 120);
}

// ---------------------------------------------------------------------------
// regularity_report: theta, whether the pressure diverges at theta
// (cofinitely regular), whether a pressure zero exists (regular), and the
// Bowen parameter itself.
// ---------------------------------------------------------------------------
struct RegularityReport {
  double theta = kNegInf;
  bool cofinitely_regular = false;
  bool regular = false;
  double h = kNaN;
};

inline RegularityReport regularity_report(const SystemSpec& spec) {
  RegularityReport rep;
  rep.theta = finiteness_parameter(spec);
  // Finite alphabets: every subsystem has a pressure zero, trivially so.
  rep.cofinitely_regular =
      !spec.infinite || !detail::tail_finite(spec.tail, rep.theta);
  try {
    rep.h = bowen_parameter(spec);
    rep.regular = true;
  } catch (const SolverError&) {
    rep.regular = false;
    rep.h = kNaN;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// manhattan_boundary: the upper edge q0(t) of the convergence region
// D = {(t,q) : Z(t,q) < inf}, located by bisection on the divergence
// predicate for each requested t.  Bounded families give a half-plane
// {t > theta}; finite alphabets give the whole plane.
// ---------------------------------------------------------------------------
struct ManhattanBoundary {
  enum class Kind { whole_plane, half_plane, curve };
  Kind kind = Kind::whole_plane;
  double theta = kNegInf;                         // half_plane only
  std::vector<std::pair<double, double>> samples;  // (t, q0(t)) for curve
};

inline ManhattanBoundary manhattan_boundary(const SystemSpec& spec,
                                            const PotentialFamily& fam,
                                            const std::vector<double>& t_grid) {
  ManhattanBoundary mb;
  if (!spec.infinite) return mb;  // whole plane
  if (!fam.lyapunov && !fam.comparability) {
    if (fam.bounded) {
      mb.kind = ManhattanBoundary::Kind::half_plane;
      mb.theta = finiteness_parameter(spec);
      return mb;
    }
    throw ValidationError(
        "boundary shape unknown: family declares neither comparability nor "
        "boundedness");
  }
  mb.kind = ManhattanBoundary::Kind::curve;
  for (double t : t_grid) {
    const auto diverges = [&](double q) {
      return !detail::tail_finite(spec.tail,
                                  detail::tail_exponent(spec, fam, t, q).u);
    };
    double q_bad = 1.0;
    while (!diverges(q_bad)) q_bad *= 2.0;
    double q_good = q_bad - 1.0;
    while (diverges(q_good)) {
      q_bad = q_good;
      q_good = q_good * 2.0 - 1.0;
      if (q_good < -1e12)
        throw SolverError("no finite q keeps Z(t, q) convergent at t = " +
                          format_g17(t));
    }
    mb.samples.emplace_back(
        t, detail::bisect_predicate(diverges, q_good, q_bad, 100));
  }
  return mb;
}

// ---------------------------------------------------------------------------
// boundary_blowup_check: approach q0(t) from below along geometrically
// shrinking distances and record P and dP/dq, which must both increase
// (they diverge at the boundary for cofinitely regular tails).
// ---------------------------------------------------------------------------
struct BlowupProbe {
  double q = 0.0;
  double value = 0.0;
  double dp_dq = 0.0;
};

struct BlowupReport {
  bool applicable = false;  // false for finite alphabets (no boundary)
  bool value_increasing = false;
  bool slope_increasing = false;
  std::vector<BlowupProbe> probes;
};

inline BlowupReport boundary_blowup_check(const SystemSpec& spec,
                                          const PotentialFamily& fam, double t,
                                          int n_probes = 20) {
  BlowupReport rep;
  if (!spec.infinite) return rep;
  const auto mb = manhattan_boundary(spec, fam, {t});
  if (mb.kind != ManhattanBoundary::Kind::curve) return rep;
  const double q0 = mb.samples.front().second;
  rep.applicable = true;
  rep.value_increasing = rep.slope_increasing = true;
  const auto lr = detail::log_ratios(spec);
  double prev_v = kNegInf, prev_s = kNegInf;
  for (int k = 1; k <= n_probes; ++k) {
    const double q = q0 - std::ldexp(1.0, -k);  // q0 - 2^-k
    const auto e =
        detail::eval_pressure(spec, fam, lr, t, q, detail::EvalLevel::grad);
    if (!e.finite) continue;  // boundary located to ~1e-30: cannot trigger
    rep.value_increasing = rep.value_increasing && e.value > prev_v;
    rep.slope_increasing = rep.slope_increasing && e.dq > prev_s;
    prev_v = e.value;
    prev_s = e.dq;
    rep.probes.push_back({q, e.value, e.dq});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// truncation_report: two trust checks for truncated infinite alphabets.
//  * consistent — pressure evaluated with half the stored symbols stays
//    within the combined declared truncation-error bounds of both runs, so
//    the tail declaration and the stored data tell the same story;
//  * accurate — the declared truncation error at the probe points is below
//    the caller's tolerance, i.e. the stored alphabet is long enough for
//    results at that accuracy.
// Finite alphabets are trivially consistent and accurate.
// ---------------------------------------------------------------------------
struct TruncationReport {
  bool applicable = false;
  bool consistent = true;
  bool accurate = true;
  double worst_gap = 0.0;        // max |P_full - P_half| over the probes
  double worst_allowance = 0.0;  // combined error bound at that probe
  double max_tail_error = 0.0;   // declared truncation error, full alphabet
  std::size_t probes_used = 0;
};

inline TruncationReport truncation_report(
    const SystemSpec& spec, const PotentialFamily& fam,
    const std::vector<std::pair<double, double>>& probes, double tol = 1e-8) {
  TruncationReport rep;
  if (!spec.infinite || spec.size() < 4) return rep;
  rep.applicable = true;
  const SystemSpec half = truncate_system(spec, spec.size() / 2);
  const PotentialFamily half_fam =
      fam.lyapunov ? lyapunov_family(half) : truncate_family(fam, half.size());
  for (const auto& [t, q] : probes) {
    const auto full_pt = pressure(spec, fam, t, q);
    const auto half_pt = pressure(half, half_fam, t, q);
    if (!full_pt.in_region || !half_pt.in_region) continue;
    ++rep.probes_used;
    const double gap = std::abs(full_pt.value - half_pt.value);
    const double allowance = full_pt.tail_error + half_pt.tail_error +
                             64.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(1.0, std::abs(full_pt.value));
    if (gap > rep.worst_gap) {
      rep.worst_gap = gap;
      rep.worst_allowance = allowance;
    }
    if (gap > allowance) rep.consistent = false;
    rep.max_tail_error = std::max(rep.max_tail_error, full_pt.tail_error);
  }
  rep.accurate = rep.max_tail_error <= tol;
  return rep;
}

}  // namespace mfspec
