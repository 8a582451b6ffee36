// Full-shift evaluation core: the one-symbol weighted partition sum
//   Z(t,q) = sum_e r_e^t * exp(q f_e)
// with its log-space moments (for the pressure gradient and Hessian), plus
// the tail classification/remainder machinery for truncated infinite
// alphabets.  Everything is accumulated as exp(g - max g) so arbitrarily
// deep t, q never overflow.
#pragma once

#include <cmath>
#include <cstddef>

#include "core.hpp"
#include "system.hpp"

namespace mfspec::detail {

// How the tail of the weight sequence w_n = r_n^t e^{q f_n} compares to the
// ratio profile: w_n is bracketed by profile(n)^u shifted by the log-band
// [band_lo, band_hi].  `exact_geometric` marks the case where the bracket
// collapses to equality with a geometric profile.
struct TailExponent {
  bool classifiable = false;
  double u = 0.0;        // effective profile exponent
  double band_lo = 0.0;  // additive log-space band
  double band_hi = 0.0;
  bool exact_geometric = false;
  double slope = 1.0;  // exact path only: f_n = -slope log r_n + shift
  double shift = 0.0;
};

inline TailExponent tail_exponent(const SystemSpec& spec,
                                  const PotentialFamily& fam, double t,
                                  double q) {
  TailExponent te;
  if (!spec.infinite) return te;
  if (fam.lyapunov) {
    te.classifiable = true;
    te.u = t - q;  // w_n = r_n^{t-q} exactly
    te.exact_geometric =
        spec.tail.kind == TailKind::geometric && spec.tail.exact;
    return te;
  }
  if (fam.comparability) {
    const auto& [a, b, g] = *fam.comparability;
    te.classifiable = true;
    te.u = t - a * q;  // w_n in r_n^{t-aq} * [e^{min(qg,qb)}, e^{max(qg,qb)}]
    te.band_lo = std::min(q * g, q * b);
    te.band_hi = std::max(q * g, q * b);
    // A collapsed band means f_n = -a log r_n + g exactly, so the tail
    // weights are still an exact geometric sequence.
    te.exact_geometric = b == g && spec.tail.kind == TailKind::geometric &&
                         spec.tail.exact;
    te.slope = a;
    te.shift = g;
    return te;
  }
  if (fam.bounded) {
    // f_e in [K, M]; M is approximated by the largest stored value.
    double m = fam.lower_bound;
    for (double v : fam.values) m = std::max(m, v);
    te.classifiable = true;
    te.u = t;
    te.band_lo = std::min(q * fam.lower_bound, q * m);
    te.band_hi = std::max(q * fam.lower_bound, q * m);
    return te;
  }
  return te;  // undeclared: not classifiable
}

// Does the tail sum converge for this effective exponent?
inline bool tail_finite(const TailModel& tm, double u) {
  switch (tm.kind) {
    case TailKind::geometric:
      return u > 0.0;
    case TailKind::power_law:
      return tm.p * u > 1.0;
    case TailKind::none:
      return true;
  }
  return true;
}

// Upper bound on sum_{n>N} profile(n)^u in *linear* scale given finiteness
// (callers convert to a log-space error).  Uses the exact geometric series
// or the integral comparison for power laws.
inline double tail_sum_bound(const TailModel& tm, double u, std::size_t n) {
  if (tm.kind == TailKind::geometric) {
    const double c = std::pow(tm.c_hi, u);  // u > 0 here, so c_hi dominates
    const double log_y = -tm.alpha * u;
    const double lead = std::exp(static_cast<double>(n + 1) * log_y);
    return c * lead / -std::expm1(log_y);
  }
  if (tm.kind == TailKind::power_law) {
    const double c = std::pow(tm.c_hi, u);
    const double pu = tm.p * u;
    return c * std::pow(static_cast<double>(n), 1.0 - pu) / (pu - 1.0);
  }
  return 0.0;
}

// Precomputed log r_e, shared by every evaluation of the same system.
inline std::vector<double> log_ratios(const SystemSpec& spec) {
  std::vector<double> lr(spec.size());
  for (std::size_t e = 0; e < spec.size(); ++e)
    lr[e] = std::log(spec.ratios[e]);
  return lr;
}

// Result of evaluating the weighted sum.  When `finite` is false the value
// is the +inf marker and the moments are meaningless (NaN).
struct SeriesResult {
  bool finite = false;
  double log_z = kPosInf;
  double mean_lr = kNaN;  // weighted mean of log r_e   (= dP/dt)
  double mean_f = kNaN;   // weighted mean of f_e       (= dP/dq)
  double var_lr = kNaN;   // weighted central second moments (Hessian)
  double cov_lrf = kNaN;
  double var_f = kNaN;
  double tail_error = 0.0;  // bound on the log-scale truncation error
};

// Evaluates Z(t,q) and optionally its first/second log-derivative moments.
// For exact geometric tails with weights affinely linked to the ratios
// (lyapunov, or a collapsed comparability band) the closed-form remainders
// of the zeroth/first/second moments are added, making the result exact up
// to roundoff at any truncation; otherwise the value is the partial sum and
// tail_error carries the closed-form remainder bound.
inline SeriesResult evaluate_series(const SystemSpec& spec,
                                    const PotentialFamily& fam,
                                    const std::vector<double>& lr, double t,
                                    double q, bool need_moments) {
  const std::size_t n = spec.size();
  SeriesResult res;

  TailExponent te;
  if (spec.infinite) {
    te = tail_exponent(spec, fam, t, q);
    if (!te.classifiable) {
      throw ValidationError(
          "infinite alphabet: tail behaviour of the potential family is "
          "undeclared (need lyapunov, bounded, or comparability)");
    }
    if (!tail_finite(spec.tail, te.u)) return res;  // divergent: +inf marker
  }
  res.finite = true;

  // Pass 1: max shift.
  double m = kNegInf;
  for (std::size_t e = 0; e < n; ++e) {
    const double g = t * lr[e] + q * fam.values[e];
    m = std::max(m, g);
  }

  // Pass 2: shifted accumulation of the needed moments.
  double a0 = 0.0, a_lr = 0.0, a_f = 0.0;
  double a_lrlr = 0.0, a_lrf = 0.0, a_ff = 0.0;
  for (std::size_t e = 0; e < n; ++e) {
    const double l = lr[e];
    const double f = fam.values[e];
    const double w = std::exp(t * l + q * f - m);
    a0 += w;
    a_lr += l * w;
    a_f += f * w;
    if (need_moments) {
      a_lrlr += l * l * w;
      a_lrf += l * f * w;
      a_ff += f * f * w;
    }
  }

  double tail_share = 0.0;
  if (spec.infinite && te.exact_geometric) {
    // w_n = e^{q g} c^u y^n with y = e^{-alpha u}; add exact remainders in
    // the n-moment basis and convert via log r_n = log c - alpha n and
    // f_n = -slope log r_n + shift (both exact on this path).
    const double u = te.u;
    const double slope = te.slope;
    const double shift = te.shift;
    const double alpha = spec.tail.alpha;
    const double logc = std::log(spec.tail.c_hi);
    const double log_y = -alpha * u;
    const auto rem = detail::geometric_remainders(log_y, n);
    const double scale = std::exp(u * logc + q * shift - m);
    if (scale > 0.0 && rem.r0 > 0.0) {
      const double t0 = scale * rem.r0;
      const double t1 = scale * rem.r1;
      const double t2 = scale * rem.r2;
      const double s_lr = logc * t0 - alpha * t1;  // sum of log r_n weights
      const double s_lrlr =
          logc * logc * t0 - 2.0 * alpha * logc * t1 + alpha * alpha * t2;
      a0 += t0;
      a_lr += s_lr;
      a_f += -slope * s_lr + shift * t0;
      if (need_moments) {
        a_lrlr += s_lrlr;
        a_lrf += -slope * s_lrlr + shift * s_lr;
        a_ff += slope * slope * s_lrlr - 2.0 * slope * shift * s_lr +
                shift * shift * t0;
      }
      tail_share = t0 / a0;
    }
    // Remainder included: only roundoff is left.  The cancellation in
    // 1-y is handled by expm1, so a few ulps scaled by the tail share.
    res.tail_error =
        8.0 * std::numeric_limits<double>::epsilon() * (1.0 + tail_share);
  } else if (spec.infinite) {
    const double bound = tail_sum_bound(spec.tail, te.u, n) *
                         std::exp(std::min(te.band_hi - m, 700.0));
    res.tail_error = std::log1p(bound / a0);
  }

  res.log_z = m + std::log(a0);
  res.mean_lr = a_lr / a0;
  res.mean_f = a_f / a0;
  if (need_moments) {
    res.var_lr = std::max(0.0, a_lrlr / a0 - res.mean_lr * res.mean_lr);
    res.var_f = std::max(0.0, a_ff / a0 - res.mean_f * res.mean_f);
    res.cov_lrf = a_lrf / a0 - res.mean_lr * res.mean_f;
  }
  return res;
}

// Convenience overload for one-shot callers.
inline SeriesResult evaluate_series(const SystemSpec& spec,
                                    const PotentialFamily& fam, double t,
                                    double q, bool need_moments) {
  return evaluate_series(spec, fam, log_ratios(spec), t, q, need_moments);
}

}  // namespace mfspec::detail
