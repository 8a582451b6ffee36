// Built-in model catalog: the three-branch full shifts with digit weights,
// the dyadic interval expansion (truncated infinite alphabet with an exact
// geometric tail), the linearized continued-fraction system (power-law
// tail), and finite subsystems of the latter.  Each entry bundles the
// system with its default potential family.  closed_form_oracle() exposes
// independently derived elementary formulas for cross-checking the
// numerical solvers; nothing in the solver path ever calls them.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "system.hpp"

namespace mfspec {

struct BuiltinSystem {
  std::string name;
  std::string description;
  SystemSpec system;
  PotentialFamily family;
};

// ---------------------------------------------------------------------------
// luroth: interval expansion built from a decreasing partition
// 1 = a_0 > a_1 > ... > a_N > 0; symbol k (1-based) acts on [a_k, a_{k-1}]
// with contraction ratio a_{k-1} - a_k.  With a tail model the stored
// symbols are a truncation of the full infinite alphabet.
// ---------------------------------------------------------------------------
inline SystemSpec luroth(const std::vector<double>& partition,
                         const TailModel& tail = {}) {
  if (partition.size() < 2)
    throw ValidationError("partition needs at least two points");
  if (partition.front() != 1.0)
    throw ValidationError("partition must start at 1");
  SystemSpec spec;
  for (std::size_t k = 1; k < partition.size(); ++k) {
    const double hi = partition[k - 1];
    const double lo = partition[k];
    if (!(lo > 0.0) || !(lo < hi)) {
      throw ValidationError("partition must be strictly decreasing and "
                            "positive; entry " +
                            std::to_string(k) + " is " + format_g17(lo));
    }
    spec.ratios.push_back(hi - lo);
    spec.intervals.push_back({lo, hi});
  }
  spec.infinite = tail.kind != TailKind::none;
  spec.tail = tail;
  return spec;
}

namespace detail {

inline std::vector<double> dyadic_partition(std::size_t n) {
  std::vector<double> part(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    part[k] = std::ldexp(1.0, -static_cast<int>(k));
  return part;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The catalog.
// ---------------------------------------------------------------------------

// Three branches with ratios 1/2, 1/6, 1/12 on [1/2,1], [1/3,1/2], [1/4,1/3]
// and digit weights (1, 2, 1): the two extreme branches share the weight, so
// each interior exponent is carried by many symbol mixtures.
inline BuiltinSystem three_branch_121() {
  BuiltinSystem b;
  b.name = "three_branch_121";
  b.description =
      "full shift, ratios (1/2, 1/6, 1/12), weights (1, 2, 1); both "
      "exponent endpoints attained by two-symbol subsystems";
  b.system.ratios = {0.5, 1.0 / 6.0, 1.0 / 12.0};
  b.system.intervals = {{0.5, 1.0}, {1.0 / 3.0, 0.5}, {0.25, 1.0 / 3.0}};
  b.family.values = {1.0, 2.0, 1.0};
  b.family.bounded = true;
  b.family.lower_bound = 1.0;
  return b;
}

// Same system with weights (1, 2, 2): the endpoints are carried by single
// branches instead.
inline BuiltinSystem three_branch_122() {
  BuiltinSystem b = three_branch_121();
  b.name = "three_branch_122";
  b.description =
      "full shift, ratios (1/2, 1/6, 1/12), weights (1, 2, 2); exponent "
      "endpoints carried by single branches";
  b.family.values = {1.0, 2.0, 2.0};
  return b;
}

// Dyadic interval expansion: r_k = 2^-k with digit weights f_k = k log 2
// (the ratio-linked family).  Exact geometric tail: every evaluation adds
// closed-form remainders, so results are truncation-independent.
inline BuiltinSystem dyadic_luroth(std::size_t truncation = 200) {
  if (truncation < 2)
    throw ValidationError("truncation must be at least 2");
  BuiltinSystem b;
  b.name = "dyadic_luroth";
  b.description =
      "dyadic expansion, ratios 2^-k (exact geometric tail), ratio-linked "
      "weights k log 2";
  TailModel tail;
  tail.kind = TailKind::geometric;
  tail.c_lo = tail.c_hi = 1.0;
  tail.alpha = std::log(2.0);
  tail.exact = true;
  b.system = luroth(detail::dyadic_partition(truncation), tail);
  b.family = lyapunov_family(b.system);
  return b;
}

// Linearized continued-fraction system: branch k has ratio
// 1/(k(k+1)) = |[1/(k+1), 1/k]| and weight log(k(k+1)).  The ratios sit
// between k^-2/2 and k^-2 (power-law tail, p = 2).
inline BuiltinSystem linearized_gauss(std::size_t truncation = 10000) {
  if (truncation < 2)
    throw ValidationError("truncation must be at least 2");
  BuiltinSystem b;
  b.name = "linearized_gauss";
  b.description =
      "linearized continued-fraction branches, ratios 1/(k(k+1)) "
      "(power-law tail p=2), ratio-linked weights";
  b.system.infinite = true;
  b.system.tail.kind = TailKind::power_law;
  b.system.tail.p = 2.0;
  b.system.tail.c_lo = 0.5;
  b.system.tail.c_hi = 1.0;
  for (std::size_t k = 1; k <= truncation; ++k) {
    const double kk = static_cast<double>(k);
    b.system.ratios.push_back(1.0 / (kk * (kk + 1.0)));
    b.system.intervals.push_back({1.0 / (kk + 1.0), 1.0 / kk});
  }
  b.family = lyapunov_family(b.system);
  return b;
}

// Finite full-shift subsystem of the linearized continued-fraction system
// on the given 1-based branch labels.
inline BuiltinSystem linearized_gauss_subsystem(
    const std::vector<std::size_t>& labels) {
  if (labels.empty()) throw ValidationError("subsystem needs at least one label");
  BuiltinSystem b;
  b.name = "linearized_gauss_subsystem";
  std::string lab;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0) throw ValidationError("labels are 1-based");
    for (std::size_t j = 0; j < i; ++j) {
      if (labels[j] == labels[i])
        throw ValidationError("duplicate label " + std::to_string(labels[i]));
    }
    const double kk = static_cast<double>(labels[i]);
    b.system.ratios.push_back(1.0 / (kk * (kk + 1.0)));
    b.system.intervals.push_back({1.0 / (kk + 1.0), 1.0 / kk});
    lab += (i ? "," : "") + std::to_string(labels[i]);
  }
  b.description = "finite subsystem of linearized_gauss on branches {" + lab +
                  "}, ratio-linked weights";
  b.family = lyapunov_family(b.system);
  return b;
}

// ---------------------------------------------------------------------------
// Registry and name-based construction (used by the command-line tool).
// ---------------------------------------------------------------------------
struct BuiltinInfo {
  std::string name;
  std::string summary;
  std::size_t default_truncation = 0;  // 0: finite system
};

inline const std::vector<BuiltinInfo>& builtin_registry() {
  static const std::vector<BuiltinInfo> reg = {
      {"three_branch_121", three_branch_121().description, 0},
      {"three_branch_122", three_branch_122().description, 0},
      {"dyadic_luroth", dyadic_luroth(2).description, 200},
      {"linearized_gauss", linearized_gauss(2).description, 10000},
      {"linearized_gauss_subsystem:K1,K2,...",
       "finite subsystem of linearized_gauss on the listed branches", 0},
  };
  return reg;
}

inline BuiltinSystem make_builtin(const std::string& name,
                                  std::optional<std::size_t> truncation = {}) {
  if (name == "three_branch_121") return three_branch_121();
  if (name == "three_branch_122") return three_branch_122();
  if (name == "dyadic_luroth") return dyadic_luroth(truncation.value_or(200));
  if (name == "linearized_gauss")
    return linearized_gauss(truncation.value_or(10000));
  const std::string prefix = "linearized_gauss_subsystem:";
  if (name.rfind(prefix, 0) == 0) {
    std::vector<std::size_t> labels;
    std::size_t pos = prefix.size();
    while (pos < name.size()) {
      std::size_t next = name.find(',', pos);
      if (next == std::string::npos) next = name.size();
      const std::string tok = name.substr(pos, next - pos);
      try {
        labels.push_back(static_cast<std::size_t>(std::stoull(tok)));
      } catch (const std::exception&) {
        throw ValidationError("bad branch label '" + tok + "' in " + name);
      }
      pos = next + 1;
    }
    return linearized_gauss_subsystem(labels);
  }
  throw ValidationError("unknown builtin system '" + name +
                        "'; see list-builtins");
}

// ---------------------------------------------------------------------------
// closed_form_oracle: independently derived reference formulas.
// Every function here is elementary algebra on the model parameters plus a
// local scalar bisection; none of them call the pressure or spectrum
// solvers.  Functions are empty where no closed form exists.
// ---------------------------------------------------------------------------
struct ClosedFormOracle {
  std::string name;
  double theta = kNegInf;
  double h = kNaN;
  double xi_min = kNaN;
  double xi_zero = kNaN;
  double xi_max = kNaN;
  std::function<double(double, double)> pressure;  // P(t, q)
  std::function<double(double, double)> dp_dq;     // dP/dq(t, q)
  std::function<double(double, double)> q_of;      // q with dP/dq(t, q) = xi
  std::function<double(double)> t_of;              // spectrum t(xi)
};

namespace detail {

// Scalar bisection helper local to the oracle (kept separate from the
// solver stack on purpose).
inline double oracle_bisect(const std::function<double(double)>& fn, double lo,
                            double hi, int iters = 200) {
  double flo = fn(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Oracle for the two three-branch models: weights split the alphabet into
// a group with f = 1 (log-weight sum A) and a group with f = 2 (sum B):
//   Z = A e^q + B e^{2q},
//   dP/dq = (A e^q + 2 B e^{2q}) / Z,
//   q(t, xi) = log(A/B * (xi-1)/(2-xi)).
inline ClosedFormOracle three_branch_oracle(bool extreme_shared) {
  ClosedFormOracle o;
  const double r1 = 0.5, r2 = 1.0 / 6.0, r3 = 1.0 / 12.0;
  auto groups = [=](double t) {
    const double p1 = std::pow(r1, t), p2 = std::pow(r2, t),
                 p3 = std::pow(r3, t);
    return extreme_shared ? std::pair<double, double>{p1 + p3, p2}
                          : std::pair<double, double>{p1, p2 + p3};
  };
  o.pressure = [groups](double t, double q) {
    const auto [A, B] = groups(t);
    return std::log(A * std::exp(q) + B * std::exp(2.0 * q));
  };
  o.dp_dq = [groups](double t, double q) {
    const auto [A, B] = groups(t);
    const double w1 = A * std::exp(q), w2 = B * std::exp(2.0 * q);
    return (w1 + 2.0 * w2) / (w1 + w2);
  };
  o.q_of = [groups](double t, double xi) {
    const auto [A, B] = groups(t);
    return std::log(A / B * (xi - 1.0) / (2.0 - xi));
  };
  o.h = oracle_bisect(
      [=](double t) {
        return std::pow(r1, t) + std::pow(r2, t) + std::pow(r3, t) - 1.0;
      },
      0.0, 1.0);
  o.xi_min = 1.0;
  o.xi_max = 2.0;
  o.xi_zero = o.dp_dq(o.h, 0.0);
  const auto pressure = o.pressure;
  const auto q_of = o.q_of;
  const double h = o.h;
  o.t_of = [pressure, q_of, h](double xi) {
    return oracle_bisect(
        [&](double t) {
          const double q = q_of(t, xi);
          return pressure(t, q) - xi * q;
        },
        0.0, h);
  };
  return o;
}

}  // namespace detail

inline ClosedFormOracle closed_form_oracle(const std::string& name) {
  if (name == "three_branch_121" || name == "three_branch_122") {
    auto o = detail::three_branch_oracle(name == "three_branch_121");
    o.name = name;
    return o;
  }
  if (name == "dyadic_luroth") {
    // Ideal (untruncated) dyadic expansion: with u = t - q and y = 2^-u,
    //   P(t, q) = log(y / (1 - y))          (u > 0)
    //   dP/dq   = log(2) / (1 - y)
    //   q(t,xi) : y = 1 - log(2)/xi, u = -log2(y), q = t - u
    //   t(xi)   = u + P/xi.
    ClosedFormOracle o;
    o.name = name;
    const double l2 = std::log(2.0);
    o.theta = 0.0;
    o.h = 1.0;
    o.xi_min = l2;
    o.xi_zero = 2.0 * l2;
    o.xi_max = kPosInf;
    o.pressure = [l2](double t, double q) {
      const double u = t - q;
      if (!(u > 0.0)) return kPosInf;
      const double y = std::exp(-u * l2);
      return std::log(y) - std::log1p(-y);
    };
    o.dp_dq = [l2](double t, double q) {
      const double u = t - q;
      if (!(u > 0.0)) return kPosInf;
      return l2 / -std::expm1(-u * l2);
    };
    o.q_of = [l2](double t, double xi) {
      const double y = 1.0 - l2 / xi;
      return t + std::log(y) / l2;
    };
    o.t_of = [l2](double xi) {
      const double y = 1.0 - l2 / xi;
      const double u = -std::log(y) / l2;
      return u + (std::log(y) - std::log1p(-y)) / xi;
    };
    return o;
  }
  if (name == "linearized_gauss") {
    // No elementary pressure; the landmarks are exact: sum 1/(k(k+1))
    // telescopes to 1 (so h = 1) and sum k^-2t converges iff t > 1/2.
    ClosedFormOracle o;
    o.name = name;
    o.theta = 0.5;
    o.h = 1.0;
    o.xi_min = std::log(2.0);
    o.xi_max = kPosInf;
    return o;
  }
  throw ValidationError("no closed-form oracle for '" + name + "'");
}

}  // namespace mfspec
