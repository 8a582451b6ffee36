// Shared numeric primitives for the multifractal spectrum toolkit:
// error types, infinity markers, stable log-space helpers and the
// generic bisection used by every root-finding routine in the library.
#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace mfspec {

// Explicit markers for "diverges" / "no finite lower endpoint".  These are
// always assigned deliberately; arithmetic never overflows into them.
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Raised when inputs violate a documented precondition (bad ratios,
// malformed incidence, undeclared tail behaviour, ...).  CLI exit code 2.
class ValidationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when an iterative routine cannot meet its contract
// (non-convergence, unreachable exponent, no pressure zero, ...).
// CLI exit code 3.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// log(1 - exp(-x)) for x > 0 without cancellation.
inline double log1mexp(double x) {
  // For small x, 1 - e^{-x} ~ x: use expm1; for large x, log1p of -e^{-x}.
  return x < 0.693147180559945 ? std::log(-std::expm1(-x))
                               : std::log1p(-std::exp(-x));
}

// Closed-form geometric moment remainders: with 0 < y < 1,
//   R0 = sum_{n>N} y^n,  R1 = sum_{n>N} n y^n,  R2 = sum_{n>N} n^2 y^n.
// All three share the common factor y^{N+1}; the caller supplies it in log
// form so the remainders stay finite even when y^{N+1} underflows.
struct GeometricRemainders {
  double r0 = 0.0, r1 = 0.0, r2 = 0.0;
};

inline GeometricRemainders geometric_remainders(double log_y, std::size_t n_trunc) {
  GeometricRemainders rem;
  if (!(log_y < 0.0)) return rem;  // divergent or constant: caller guards
  const double y = std::exp(log_y);
  const double one_minus_y = -std::expm1(log_y);
  const double lead = std::exp(static_cast<double>(n_trunc + 1) * log_y);
  if (lead == 0.0) return rem;
  const double n = static_cast<double>(n_trunc);
  rem.r0 = lead / one_minus_y;
  rem.r1 = lead * ((n + 1.0) - n * y) / (one_minus_y * one_minus_y);
  rem.r2 = lead *
           ((n + 1.0) * (n + 1.0) - (2.0 * n * n + 2.0 * n - 1.0) * y +
            n * n * y * y) /
           (one_minus_y * one_minus_y * one_minus_y);
  return rem;
}

// Plain bisection for a monotone (either direction) continuous function with
// a sign change on [lo, hi].  Returns the midpoint after `iters` halvings.
inline double bisect(const std::function<double(double)>& fn, double lo,
                     double hi, int iters) {
  double flo = fn(lo);
  if (flo == 0.0) return lo;
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Bisection on a boolean predicate that switches from false to true exactly
// once on [lo, hi] (pred(lo) = false, pred(hi) = true).  Returns the jump
// location to within (hi-lo)/2^iters.
inline double bisect_predicate(const std::function<bool(double)>& pred,
                               double lo, double hi, int iters) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Shortest-round-trip-style formatting with 17 significant digits, the
// precision used by all CSV payloads (deterministic across runs).
inline std::string format_g17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace mfspec
