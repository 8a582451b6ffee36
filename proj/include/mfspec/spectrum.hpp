// Birkhoff spectrum solver.  For a requested exponent xi the dimension
// t(xi) solves the coupled system
//   P(t, q) = q * xi,    dP/dq(t, q) = xi
// (inner: monotone root in q at fixed t; outer: the strictly decreasing
// envelope W(t) = P(t, q(t)) - xi q(t) crosses zero once on [0, h]).
// Also here: the attainable exponent range with its zero-temperature
// cross-check, grid sampling with the peak exponent pinned to a node, the
// one-parameter fast path for ratio-linked weights, curve-shape
// diagnostics, and the translation-invariance identity check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "gibbs.hpp"
#include "pressure.hpp"
#include "series.hpp"
#include "system.hpp"

namespace mfspec {

namespace flags {
inline constexpr unsigned kOk = 1u;
inline constexpr unsigned kBoundaryClamped = 2u;  // inner q hit its floor/cap
inline constexpr unsigned kInnerFailed = 4u;
inline constexpr unsigned kOuterFailed = 8u;
// Reserved for points produced by closed-form inversion.  The numeric
// solvers never set it, so downstream consumers can rely on every curve
// having been obtained by root-finding alone.
inline constexpr unsigned kClosedForm = 16u;
}  // namespace flags

// ---------------------------------------------------------------------------
// Attainable exponent range.
// ---------------------------------------------------------------------------
struct ExponentRange {
  double xi_min = kNaN;   // minimum mean of f over periodic orbits
  double xi_zero = kNaN;  // exponent carried by the measure of maximal
                          // dimension: dP/dq at (h, 0); the spectrum peak
  double xi_max = kNaN;   // +inf marker when f is unbounded above
  double h = kNaN;        // Bowen parameter: the peak height
  double theta = kNegInf; // finiteness parameter of the ratio series
  bool degenerate = false;  // xi_min == xi_max: single-point spectrum
};

// The deep-q gradient limit must agree with the minimum mean cycle; the
// `q_depth` knob exists so tests can exercise the disagreement error
// honestly with a shallow probe.
inline ExponentRange exponent_range(const SystemSpec& spec,
                                    const PotentialFamily& fam,
                                    double q_depth = -40.0) {
  ExponentRange r;
  r.theta = finiteness_parameter(spec);
  r.h = bowen_parameter(spec);
  r.xi_min = min_average_oracle(spec, fam);
  const bool unbounded = spec.infinite && !fam.bounded;
  r.xi_max = unbounded ? kPosInf : max_average_oracle(spec, fam);
  r.degenerate =
      !unbounded && r.xi_max - r.xi_min <= 1e-12 * std::max(1.0, r.xi_min);
  r.xi_zero = pressure_grad(spec, fam, r.h, 0.0).second;

  const double q_deep = std::max(q_depth, detail::q_floor(fam));
  const double zt = pressure_grad(spec, fam, r.h, q_deep).second;
  if (std::abs(zt - r.xi_min) > 1e-6 * std::max(1.0, std::abs(r.xi_min))) {
    throw SolverError(
        "zero-temperature gradient limit " + format_g17(zt) + " at q = " +
        format_g17(q_deep) + " disagrees with the minimum mean cycle " +
        format_g17(r.xi_min) + " (difference " + format_g17(zt - r.xi_min) +
        ")");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Inner solve: q(t, xi) with dP/dq(t, q) = xi.
// ---------------------------------------------------------------------------
struct InnerSolve {
  double q = kNaN;
  double pressure = kNaN;
  double dp_dq = kNaN;
  bool ok = false;
  bool clamped = false;  // hit the q floor (or cap) before bracketing xi
  int evals = 0;
};

namespace detail {

inline constexpr double kInnerTol = 1e-11;   // on |dP/dq - xi|, xi-scaled
inline constexpr int kInnerMaxIter = 160;

// Upper edge of {q : Z(t, q) < inf} at fixed t; +inf when the whole line
// converges.  Only ratio-comparable families over infinite alphabets have
// a finite edge: u = t - a q crosses the divergence threshold.
inline double q_upper_limit(const SystemSpec& spec, const PotentialFamily& fam,
                            double t) {
  if (!spec.infinite) return kPosInf;
  double a = 0.0;
  if (fam.lyapunov) {
    a = 1.0;
  } else if (fam.comparability) {
    a = (*fam.comparability)[0];
  }
  if (a <= 0.0) return kPosInf;
  const double u_min =
      spec.tail.kind == TailKind::power_law ? 1.0 / spec.tail.p : 0.0;
  return (t - u_min) / a;
}

// Largest mean exponent the stored alphabet can certify.  For truncated
// alphabets without closed-form tail moments the attainable slope dP/dq is
// bounded by the partial-sum mean of f at the convergence edge u -> u_min;
// exponent targets beyond it cannot be solved no matter how the window is
// chosen.  Returns +inf when no such ceiling exists (finite alphabets,
// exact geometric tails with the ratio-linked family, uncapped q).
inline double slope_support(const SystemSpec& spec, const PotentialFamily& fam,
                            double t) {
  if (!spec.infinite) return kPosInf;
  const double q_hat = q_upper_limit(spec, fam, t);
  if (!std::isfinite(q_hat)) return kPosInf;
  if (tail_exponent(spec, fam, t, q_hat).exact_geometric) return kPosInf;
  const auto lr = log_ratios(spec);
  double m = kNegInf;
  for (std::size_t e = 0; e < spec.size(); ++e)
    m = std::max(m, t * lr[e] + q_hat * fam.values[e]);
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t e = 0; e < spec.size(); ++e) {
    const double w = std::exp(t * lr[e] + q_hat * fam.values[e] - m);
    s0 += w;
    s1 += w * fam.values[e];
  }
  return s1 / s0;
}

struct InnerEval {
  bool finite = false;
  double p = kNaN;
  double dq = kNaN;
  double var = kNaN;  // d2P/dq2 when analytic (full shift), NaN otherwise
};

inline InnerSolve inner_solve_q_impl(const SystemSpec& spec,
                                     const PotentialFamily& fam,
                                     const std::vector<double>& lr, double t,
                                     double xi, double hint) {
  InnerSolve out;
  const double q_cap_lim = q_upper_limit(spec, fam, t);
  const double q_floor_lim = q_floor(fam);
  const bool full = spec.full_shift();

  auto eval1 = [&](double q) -> InnerEval {
    ++out.evals;
    if (full) {
      const auto s = evaluate_series(spec, fam, lr, t, q, true);
      return {s.finite, s.log_z, s.mean_f, s.var_f};
    }
    const auto e = eval_pressure(spec, fam, lr, t, q, EvalLevel::grad);
    return {e.finite, e.value, e.dq, kNaN};
  };

  // Starting point strictly inside (q_floor, q_cap).
  double q0 = std::isfinite(hint) ? hint
              : std::isfinite(q_cap_lim) ? q_cap_lim - 1.0
                                         : 0.0;
  if (std::isfinite(q_cap_lim) && q0 >= q_cap_lim)
    q0 = q_cap_lim - std::max(1e-6, 1e-6 * std::abs(q_cap_lim));
  q0 = std::max(q0, q_floor_lim + 1.0e-3);
  InnerEval e0 = eval1(q0);
  if (!e0.finite) return out;  // t itself outside the convergence strip

  // Bracket [ql, qh] with dq(ql) < xi < dq(qh).
  double ql, qh;
  InnerEval el, eh;
  if (e0.dq == xi) {
    out.q = q0;
    out.pressure = e0.p;
    out.dp_dq = e0.dq;
    out.ok = true;
    return out;
  }
  if (e0.dq < xi) {
    ql = q0;
    el = e0;
    qh = q0;
    double step = 1.0;
    for (int k = 0;; ++k) {
      if (k >= kInnerMaxIter) return out;  // saturated below xi: unreachable
      if (std::isfinite(q_cap_lim)) {
        qh = q_cap_lim - (q_cap_lim - qh) * 0.5;  // halve the gap to the edge
      } else {
        if (qh + step > -q_floor_lim) {  // symmetric cap for the free side
          out.clamped = true;
          return out;
        }
        qh += step;
        step *= 2.0;
      }
      eh = eval1(qh);
      if (!eh.finite) return out;
      if (eh.dq > xi) break;
      ql = qh;
      el = eh;
    }
  } else {
    qh = q0;
    eh = e0;
    ql = q0;
    double step = 1.0;
    for (int k = 0;; ++k) {
      if (k >= kInnerMaxIter) return out;
      if (ql - step < q_floor_lim) {
        out.clamped = true;
        return out;
      }
      ql -= step;
      step *= 2.0;
      el = eval1(ql);
      if (!el.finite) return out;
      if (el.dq < xi) break;
      qh = ql;
      eh = el;
    }
  }

  // Safeguarded Newton (analytic d2P/dq2 on full shifts) with bisection
  // fallback; the bracket is tightened by every evaluation.
  const double tol = kInnerTol * std::max(1.0, std::abs(xi));
  double x = std::isfinite(hint) && hint > ql && hint < qh ? hint
                                                           : 0.5 * (ql + qh);
  for (int it = 0; it < kInnerMaxIter; ++it) {
    const InnerEval e = eval1(x);
    if (!e.finite) return out;
    const double resid = e.dq - xi;
    if (std::abs(resid) <= tol) {
      out.q = x;
      out.pressure = e.p;
      out.dp_dq = e.dq;
      out.ok = true;
      return out;
    }
    (resid < 0.0 ? ql : qh) = x;
    double xn = kNaN;
    if (std::isfinite(e.var) && e.var > 0.0) xn = x - resid / e.var;
    x = (xn > ql && xn < qh) ? xn : 0.5 * (ql + qh);
    if (qh - ql <= 8.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(x))) {
      // Bracket exhausted at floating-point resolution; accept only if the
      // gradient noise floor explains the residual.
      const InnerEval ef = eval1(x);
      out.q = x;
      out.pressure = ef.p;
      out.dp_dq = ef.dq;
      out.ok = std::abs(ef.dq - xi) <= 1e4 * tol;
      return out;
    }
  }
  return out;
}

}  // namespace detail

inline InnerSolve inner_solve_q(const SystemSpec& spec,
                                const PotentialFamily& fam, double t,
                                double xi, double hint = kNaN) {
  return detail::inner_solve_q_impl(spec, fam, detail::log_ratios(spec), t, xi,
                                    hint);
}

// ---------------------------------------------------------------------------
// Outer solve: the dimension t(xi).
// ---------------------------------------------------------------------------
struct SpectrumPoint {
  double xi = kNaN;
  double t = kNaN;   // spectrum value (Hausdorff dimension of the level set)
  double q = kNaN;
  double pressure = kNaN;       // P(t, q) at the solution
  double residual_w = kNaN;     // |P - q*xi|
  double residual_grad = kNaN;  // |dP/dq - xi|
  unsigned flags = 0;
  bool ok() const { return (flags & flags::kOk) != 0; }
};

struct OuterOptions {
  double tol_w = 1e-10;    // scaled by max(1, |q*xi|)
  double tol_grad = 1e-9;  // scaled by max(1, |xi|)
  int max_bisect = 90;
  std::optional<std::pair<double, double>> t_bracket;  // default [0, h]
  double hint_q = kNaN;
};

namespace detail {

inline void require_attainable(const ExponentRange& range, double xi) {
  if (range.degenerate) {
    throw ValidationError(
        "every periodic orbit carries the same mean " +
        format_g17(range.xi_min) +
        ": the spectrum degenerates to a single point and cannot be "
        "sampled");
  }
  if (!(xi > range.xi_min) ||
      (std::isfinite(range.xi_max) && !(xi < range.xi_max))) {
    throw ValidationError("exponent xi = " + format_g17(xi) +
                          " lies outside the open attainable range (" +
                          format_g17(range.xi_min) + ", " +
                          format_g17(range.xi_max) + ")");
  }
}

}  // namespace detail

inline SpectrumPoint outer_solve_t(const SystemSpec& spec,
                                   const PotentialFamily& fam,
                                   const ExponentRange& range, double xi,
                                   const OuterOptions& opts = {}) {
  detail::require_attainable(range, xi);
  const auto lr = detail::log_ratios(spec);
  SpectrumPoint pt;
  pt.xi = xi;

  double lo = 0.0, hi = range.h;
  if (opts.t_bracket) {
    lo = opts.t_bracket->first;
    hi = opts.t_bracket->second;
    if (!(lo < hi))
      throw ValidationError("outer bracket must satisfy lo < hi");
  }

  double q_hint = opts.hint_q;
  bool have_best = false, any_clamped = false;
  double best_t = kNaN, best_w = kPosInf;
  InnerSolve best_inner;

  for (int it = 0; it < opts.max_bisect; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const InnerSolve inner =
        detail::inner_solve_q_impl(spec, fam, lr, mid, xi, q_hint);
    any_clamped = any_clamped || inner.clamped;
    if (!inner.ok) {
      // xi unreachable at this t: the peak side (larger t) is always
      // reachable, so shrink toward it.
      lo = mid;
      continue;
    }
    q_hint = inner.q;
    const double w = inner.pressure - xi * inner.q;
    if (std::abs(w) < std::abs(best_w)) {
      best_w = w;
      best_t = mid;
      best_inner = inner;
      have_best = true;
    }
    if (w > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(hi))) break;
  }

  if (any_clamped) pt.flags |= flags::kBoundaryClamped;
  if (!have_best) {
    pt.flags |= flags::kInnerFailed | flags::kOuterFailed;
    return pt;
  }
  pt.t = best_t;
  pt.q = best_inner.q;
  pt.pressure = best_inner.pressure;
  pt.residual_w = std::abs(best_w);
  pt.residual_grad = std::abs(best_inner.dp_dq - xi);
  const bool w_ok =
      pt.residual_w <= opts.tol_w * std::max(1.0, std::abs(xi * pt.q));
  const bool g_ok =
      pt.residual_grad <= opts.tol_grad * std::max(1.0, std::abs(xi));
  if (w_ok && g_ok) {
    pt.flags |= flags::kOk;
  } else {
    pt.flags |= flags::kOuterFailed;
  }
  return pt;
}

// ---------------------------------------------------------------------------
// Grid sampling.
// ---------------------------------------------------------------------------
struct GridSpec {
  std::size_t count = 201;
  std::optional<double> xi_lo;  // default: xi_min + margin
  std::optional<double> xi_hi;  // default: xi_max - margin, or xi_cap
  double xi_cap = 10.0;         // upper cut when xi_max = +inf
  double margin = 1e-3;         // relative margin kept off finite endpoints
};

struct SpectrumCurve {
  ExponentRange range;
  std::vector<SpectrumPoint> points;
  std::size_t n_failed = 0;
};

namespace detail {

// Grid nodes with xi_zero landing exactly on a node whenever it lies
// strictly inside the window.
inline std::vector<double> build_grid(const ExponentRange& range, double lo,
                                      double hi, std::size_t count) {
  std::vector<double> xs;
  xs.reserve(count);
  const double xi0 = range.xi_zero;
  if (xi0 > lo && xi0 < hi) {
    const auto n_left = static_cast<std::size_t>(std::clamp(
        std::round((static_cast<double>(count - 1)) * (xi0 - lo) / (hi - lo)),
        0.0, static_cast<double>(count - 1)));
    for (std::size_t i = 0; i < n_left; ++i) {
      xs.push_back(lo + (xi0 - lo) * static_cast<double>(i) /
                            static_cast<double>(n_left));
    }
    xs.push_back(xi0);
    const std::size_t n_right = count - 1 - n_left;
    for (std::size_t j = 1; j <= n_right; ++j) {
      xs.push_back(xi0 + (hi - xi0) * static_cast<double>(j) /
                             static_cast<double>(n_right));
    }
    xs.back() = hi;
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      xs.push_back(lo + (hi - lo) * static_cast<double>(i) /
                            static_cast<double>(count - 1));
    }
    xs.back() = hi;
  }
  return xs;
}

}  // namespace detail

inline SpectrumCurve sample_spectrum(const SystemSpec& spec,
                                     const PotentialFamily& fam,
                                     const ExponentRange& range,
                                     const GridSpec& grid = {},
                                     OuterOptions opts = {}) {
  if (grid.count < 2)
    throw ValidationError("grid needs at least 2 points");
  if (range.degenerate) detail::require_attainable(range, range.xi_min);

  const bool hi_capped = !std::isfinite(range.xi_max);
  double lo = grid.xi_lo.value_or(range.xi_min);
  double hi = grid.xi_hi.value_or(hi_capped ? grid.xi_cap : range.xi_max);
  bool hi_open = !grid.xi_hi && !hi_capped;  // needs a margin off the endpoint
  if (!grid.xi_hi && hi_capped) {
    // Unbounded exponents: stay within what the stored alphabet supports.
    const double support = detail::slope_support(spec, fam, range.h);
    if (support < hi) {
      hi = support;
      hi_open = true;
    }
  }
  if (!(hi > lo)) {
    throw ValidationError("grid window [" + format_g17(lo) + ", " +
                          format_g17(hi) + "] is empty");
  }
  const double margin_abs = grid.margin * (hi - lo);
  if (!grid.xi_lo) lo += margin_abs;
  if (hi_open) hi -= margin_abs;
  detail::require_attainable(range, lo);
  detail::require_attainable(range, hi);

  SpectrumCurve curve;
  curve.range = range;
  const auto xs = detail::build_grid(range, lo, hi, grid.count);
  for (double xi : xs) {
    const auto pt = outer_solve_t(spec, fam, range, xi, opts);
    if (pt.ok()) {
      opts.hint_q = pt.q;
    } else {
      ++curve.n_failed;
    }
    curve.points.push_back(pt);
  }
  return curve;
}

inline SpectrumCurve sample_spectrum(const SystemSpec& spec,
                                     const PotentialFamily& fam,
                                     const GridSpec& grid = {}) {
  return sample_spectrum(spec, fam, exponent_range(spec, fam), grid);
}

// ---------------------------------------------------------------------------
// Fast path for the ratio-linked family f = -log r: P(t, q) collapses to
// the one-parameter function p1(u) = P(u, 0) at u = t - q, so each curve
// point is a single scalar root p1'(u) = -xi followed by
//   q = p1(u) / xi,   t = u + q.
// ---------------------------------------------------------------------------
inline SpectrumCurve lyapunov_spectrum(const SystemSpec& spec,
                                       const GridSpec& grid = {}) {
  const auto fam = lyapunov_family(spec);
  const auto range = exponent_range(spec, fam);
  const auto lr = detail::log_ratios(spec);
  if (grid.count < 2)
    throw ValidationError("grid needs at least 2 points");

  const bool hi_capped = !std::isfinite(range.xi_max);
  double lo = grid.xi_lo.value_or(range.xi_min);
  double hi = grid.xi_hi.value_or(hi_capped ? grid.xi_cap : range.xi_max);
  bool hi_open = !grid.xi_hi && !hi_capped;
  if (!grid.xi_hi && hi_capped) {
    const double support = detail::slope_support(spec, fam, range.h);
    if (support < hi) {
      hi = support;
      hi_open = true;
    }
  }
  if (!(hi > lo)) {
    throw ValidationError("grid window [" + format_g17(lo) + ", " +
                          format_g17(hi) + "] is empty");
  }
  const double margin_abs = grid.margin * (hi - lo);
  if (!grid.xi_lo) lo += margin_abs;
  if (hi_open) hi -= margin_abs;
  detail::require_attainable(range, lo);
  detail::require_attainable(range, hi);

  auto eval_u = [&](double u) {
    // mean log-ratio (= p1'(u)) and its u-derivative where analytic.
    return detail::eval_pressure(spec, fam, lr, u, 0.0,
                                 spec.full_shift() ? detail::EvalLevel::hess
                                                   : detail::EvalLevel::grad);
  };

  SpectrumCurve curve;
  curve.range = range;
  double u_hint = kNaN;
  for (double xi : detail::build_grid(range, lo, hi, grid.count)) {
    SpectrumPoint pt;
    pt.xi = xi;
    const double target = -xi;  // want p1'(u) = mean_lr(u) = -xi
    // Bracket: mean_lr increases in u toward -xi_min.
    double ul, uh;
    bool bracketed = false;
    double u0 = std::isfinite(u_hint) ? u_hint : range.h + 1.0;
    if (spec.infinite && u0 <= range.theta)
      u0 = range.theta + std::max(1.0, std::abs(range.theta));
    auto e0 = eval_u(u0);
    if (e0.finite) {
      if (e0.dt < target) {
        ul = u0;
        uh = u0;
        double step = 1.0;
        for (int k = 0; k < 200; ++k) {
          uh += step;
          step *= 2.0;
          const auto e = eval_u(uh);
          if (!e.finite) break;
          if (e.dt > target) {
            bracketed = true;
            break;
          }
          ul = uh;
        }
      } else {
        uh = u0;
        ul = u0;
        for (int k = 0; k < 400; ++k) {
          if (spec.infinite) {
            ul = range.theta + (ul - range.theta) * 0.5;
          } else {
            ul = ul > 0.0 ? -1.0 : ul * 2.0;
          }
          const auto e = eval_u(ul);
          if (!e.finite) break;
          if (e.dt < target) {
            bracketed = true;
            break;
          }
          uh = ul;
        }
      }
    }
    if (!bracketed) {
      pt.flags |= flags::kInnerFailed | flags::kOuterFailed;
      curve.points.push_back(pt);
      ++curve.n_failed;
      continue;
    }
    // Safeguarded Newton on g(u) = mean_lr(u) - target.
    const double tol = detail::kInnerTol * std::max(1.0, std::abs(xi));
    double x = 0.5 * (ul + uh);
    bool solved = false;
    double p1 = kNaN, slope = kNaN;
    for (int it = 0; it < detail::kInnerMaxIter; ++it) {
      const auto e = eval_u(x);
      if (!e.finite) break;
      const double resid = e.dt - target;
      if (std::abs(resid) <= tol) {
        solved = true;
        p1 = e.value;
        slope = e.dt;
        break;
      }
      (resid < 0.0 ? ul : uh) = x;
      double xn = kNaN;
      if (std::isfinite(e.dtt) && e.dtt > 0.0) xn = x - resid / e.dtt;
      x = (xn > ul && xn < uh) ? xn : 0.5 * (ul + uh);
      if (uh - ul <= 8.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::abs(x))) {
        const auto ef = eval_u(x);
        p1 = ef.value;
        slope = ef.dt;
        solved = std::abs(ef.dt - target) <= 1e4 * tol;
        break;
      }
    }
    if (!solved) {
      pt.flags |= flags::kInnerFailed | flags::kOuterFailed;
      curve.points.push_back(pt);
      ++curve.n_failed;
      continue;
    }
    u_hint = x;
    pt.q = p1 / xi;
    pt.t = x + pt.q;
    pt.pressure = p1;
    pt.residual_w = 0.0;  // identity by construction; re-derived below
    pt.residual_grad = std::abs(-slope - xi);
    // Independent residual: evaluate the two-parameter pressure at (t, q).
    const auto chk =
        detail::eval_pressure(spec, fam, lr, pt.t, pt.q, detail::EvalLevel::value);
    if (chk.finite) pt.residual_w = std::abs(chk.value - pt.q * xi);
    pt.flags |= flags::kOk;
    curve.points.push_back(pt);
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Shape diagnostics over a sampled curve.
// ---------------------------------------------------------------------------
struct ShapeReport {
  bool all_points_ok = false;
  bool q_signs_ok = false;      // q <= 0 left of the peak exponent, >= 0 right
  bool rising_left = false;     // t nondecreasing up to the peak node
  bool falling_right = false;   // t nonincreasing after the peak node
  bool peak_at_xi_zero = false; // argmax lands at the pinned node, t_max = h
  bool concave_at_peak = false; // nonuniform second difference < 0
  bool inflection_applicable = false;  // unbounded families only
  bool inflection_right = false;  // concave-to-convex switch right of peak
  bool deep_q_witness = false;    // some q < -2 (informational)
  double peak_xi = kNaN, peak_t = kNaN, d2_at_peak = kNaN;
  double min_q = kNaN, max_q = kNaN;
  bool ok = false;
};

inline ShapeReport shape_diagnostics(const SpectrumCurve& curve) {
  ShapeReport rep;
  const auto& pts = curve.points;
  const std::size_t n = pts.size();
  if (n < 3) throw ValidationError("shape diagnostics need >= 3 points");
  rep.all_points_ok = curve.n_failed == 0;

  // Locate the pinned peak-exponent node (nearest node otherwise).
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(pts[i].xi - curve.range.xi_zero) <
        std::abs(pts[i0].xi - curve.range.xi_zero))
      i0 = i;
  }

  const double q_tol = 1e-8;
  rep.q_signs_ok = true;
  rep.min_q = kPosInf;
  rep.max_q = kNegInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (!pts[i].ok()) continue;
    rep.min_q = std::min(rep.min_q, pts[i].q);
    rep.max_q = std::max(rep.max_q, pts[i].q);
    if (pts[i].xi < curve.range.xi_zero - q_tol && pts[i].q > q_tol)
      rep.q_signs_ok = false;
    if (pts[i].xi > curve.range.xi_zero + q_tol && pts[i].q < -q_tol)
      rep.q_signs_ok = false;
  }
  rep.deep_q_witness = rep.min_q < -2.0;

  const double t_tol = 1e-9;
  rep.rising_left = rep.falling_right = true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!pts[i].ok() || !pts[i + 1].ok()) continue;
    if (i + 1 <= i0 && pts[i + 1].t < pts[i].t - t_tol) rep.rising_left = false;
    if (i >= i0 && pts[i + 1].t > pts[i].t + t_tol) rep.falling_right = false;
  }

  std::size_t i_max = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (pts[i].ok() && (!pts[i_max].ok() || pts[i].t > pts[i_max].t)) i_max = i;
  }
  rep.peak_xi = pts[i_max].xi;
  rep.peak_t = pts[i_max].t;
  const double step_near_peak =
      std::max(i0 > 0 ? pts[i0].xi - pts[i0 - 1].xi : 0.0,
               i0 + 1 < n ? pts[i0 + 1].xi - pts[i0].xi : 0.0);
  rep.peak_at_xi_zero =
      std::abs(rep.peak_xi - curve.range.xi_zero) <= 1.5 * step_near_peak &&
      std::abs(rep.peak_t - curve.range.h) <=
          1e-6 * std::max(1.0, curve.range.h);

  // Nonuniform central second difference.
  auto d2_at = [&](std::size_t i) {
    const double h1 = pts[i].xi - pts[i - 1].xi;
    const double h2 = pts[i + 1].xi - pts[i].xi;
    return 2.0 *
           (h2 * pts[i - 1].t + h1 * pts[i + 1].t - (h1 + h2) * pts[i].t) /
           (h1 * h2 * (h1 + h2));
  };
  if (i0 > 0 && i0 + 1 < n && pts[i0 - 1].ok() && pts[i0].ok() &&
      pts[i0 + 1].ok()) {
    rep.d2_at_peak = d2_at(i0);
    rep.concave_at_peak = rep.d2_at_peak < 0.0;
  }

  rep.inflection_applicable = !std::isfinite(curve.range.xi_max);
  if (rep.inflection_applicable) {
    bool seen_concave = false;
    for (std::size_t i = i0 + 1; i + 1 < n; ++i) {
      if (!pts[i - 1].ok() || !pts[i].ok() || !pts[i + 1].ok()) continue;
      const double d2 = d2_at(i);
      if (d2 < 0.0) seen_concave = true;
      if (seen_concave && d2 > 0.0) {
        rep.inflection_right = true;
        break;
      }
    }
  }

  rep.ok = rep.all_points_ok && rep.q_signs_ok && rep.rising_left &&
           rep.falling_right && rep.peak_at_xi_zero && rep.concave_at_peak &&
           (!rep.inflection_applicable || rep.inflection_right);
  return rep;
}

// ---------------------------------------------------------------------------
// Translation invariance: the spectrum of f + a at exponent xi + a equals
// the spectrum of f at xi.  Returns the largest |t| discrepancy over the
// supplied exponents (all solved from scratch on both sides).
// ---------------------------------------------------------------------------
inline double translation_invariance_check(const SystemSpec& spec,
                                           const PotentialFamily& fam,
                                           double a,
                                           const std::vector<double>& xis) {
  const auto fam_a = translate_family(fam, a);
  const auto range = exponent_range(spec, fam);
  const auto range_a = exponent_range(spec, fam_a);
  double worst = 0.0;
  for (double xi : xis) {
    const auto p0 = outer_solve_t(spec, fam, range, xi);
    const auto p1 = outer_solve_t(spec, fam_a, range_a, xi + a);
    if (!p0.ok() || !p1.ok()) {
      throw SolverError("translation check: solve failed at xi = " +
                        format_g17(xi) + " (flags " +
                        std::to_string(p0.flags) + ", " +
                        std::to_string(p1.flags) + ")");
    }
    worst = std::max(worst, std::abs(p0.t - p1.t));
  }
  return worst;
}

}  // namespace mfspec
