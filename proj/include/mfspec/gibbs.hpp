// Equilibrium (Gibbs) states of t log|Phi'| + q F and the checks built on
// them: the variational identity, the cylinder-ratio (Gibbs inequality)
// scan, Karp minimum/maximum mean-cycle oracles for the extreme Birkhoff
// averages, and the zero-temperature trace q -> -inf.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "core.hpp"
#include "perron.hpp"
#include "pressure.hpp"
#include "series.hpp"
#include "system.hpp"

namespace mfspec {

// For truncated infinite alphabets the state is the equilibrium state of
// the truncated subsystem, so `stationary` always sums to 1 exactly.
struct GibbsState {
  std::vector<double> stationary;
  std::vector<std::vector<double>> transition;  // Markov only; empty otherwise
  double entropy = 0.0;
  double lyapunov = 0.0;    // -integral of log r  (> 0)
  double f_exponent = 0.0;  // integral of f       (> 0)
  double dimension = 0.0;   // entropy / lyapunov
};

namespace detail {

// Deepest q the solvers will visit.  Bounded families use the safe
// exponent budget -700/max|f|; unbounded families are evaluated with
// max-shifted logs, so only a nominal deep floor applies.
inline double q_floor(const PotentialFamily& fam) {
  if (!fam.bounded) return -1e9;
  double m = 0.0;
  for (double v : fam.values) m = std::max(m, std::abs(v));
  return m > 0.0 ? -700.0 / m : -1e9;
}

}  // namespace detail

inline GibbsState gibbs_state(const SystemSpec& spec,
                              const PotentialFamily& fam, double t, double q) {
  const std::size_t n = spec.size();
  const auto lr = detail::log_ratios(spec);
  GibbsState st;
  st.stationary.resize(n);
  if (spec.full_shift()) {
    // Product (Bernoulli) state with weights w_e = r_e^t e^{q f_e}.
    double m = kNegInf;
    for (std::size_t e = 0; e < n; ++e)
      m = std::max(m, t * lr[e] + q * fam.values[e]);
    double a0 = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      st.stationary[e] = std::exp(t * lr[e] + q * fam.values[e] - m);
      a0 += st.stationary[e];
    }
    double s_lr = 0.0, s_f = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      st.stationary[e] /= a0;
      s_lr += st.stationary[e] * lr[e];
      s_f += st.stationary[e] * fam.values[e];
    }
    const double log_z = m + std::log(a0);
    st.entropy = std::max(0.0, log_z - t * s_lr - q * s_f);
    st.lyapunov = -s_lr;
    st.f_exponent = s_f;
  } else {
    std::vector<double> g(n);
    for (std::size_t a = 0; a < n; ++a) g[a] = t * lr[a] + q * fam.values[a];
    const auto pr = detail::perron_power_iteration(spec, g);
    double sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      st.stationary[a] = pr.left[a] * pr.right[a];
      sum += st.stationary[a];
    }
    for (double& p : st.stationary) p /= sum;
    st.transition.assign(n, std::vector<double>(n, 0.0));
    double entropy = 0.0, s_lr = 0.0, s_f = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      double row_h = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        if (!spec.incidence[a][b]) continue;
        // Balanced entry exp(g_a + x_b - x_a - shift); the similarity
        // exponents cancel against the balanced Perron vector, so this is
        // the transition kernel of the original matrix.
        const double tab =
            std::exp(g[a] + pr.balance[b] - pr.balance[a] - pr.shift) *
            pr.right[b] / (pr.rho_shifted * pr.right[a]);
        st.transition[a][b] = tab;
        if (tab > 0.0) row_h -= tab * std::log(tab);
      }
      entropy += st.stationary[a] * row_h;
      s_lr += st.stationary[a] * lr[a];
      s_f += st.stationary[a] * fam.values[a];
    }
    st.entropy = std::max(0.0, entropy);
    st.lyapunov = -s_lr;
    st.f_exponent = s_f;
  }
  st.dimension = st.entropy / st.lyapunov;
  return st;
}

// |h(mu) + t * int log r dmu + q * int f dmu - P(t,q)|.  For truncated
// infinite alphabets the residual carries the tail share of the pressure.
inline double variational_check(const SystemSpec& spec,
                                const PotentialFamily& fam, double t,
                                double q) {
  const auto st = gibbs_state(spec, fam, t, q);
  const double p = pressure_value(spec, fam, t, q);
  return std::abs(st.entropy - t * st.lyapunov + q * st.f_exponent - p);
}

// ---------------------------------------------------------------------------
// gibbs_inequality_check: exhaustively scans admissible words w with
// 1 <= |w| <= word_len and reports the extreme cylinder ratios
//   mu([w]) / exp(S_w - |w| P).
// Depth-1 product states give exactly 1; Markov chains a finite band.
// ---------------------------------------------------------------------------
struct GibbsInequalityResult {
  double c_min = kPosInf;
  double c_max = kNegInf;
  std::size_t words_checked = 0;
};

inline GibbsInequalityResult gibbs_inequality_check(const SystemSpec& spec,
                                                    const PotentialFamily& fam,
                                                    double t, double q,
                                                    std::size_t word_len) {
  if (word_len < 1 || word_len > 8) {
    throw ValidationError("word_len must be in [1, 8], got " +
                          std::to_string(word_len));
  }
  const std::size_t n = spec.size();
  double count = 0.0, layer = static_cast<double>(n);
  for (std::size_t k = 1; k <= word_len; ++k) {
    count += layer;
    layer *= static_cast<double>(n);
    if (count > 1e7) {
      throw ValidationError(
          "word enumeration would exceed 10^7 cylinders; reduce word_len or "
          "the alphabet");
    }
  }

  const auto lr = detail::log_ratios(spec);
  std::vector<double> g(n);
  for (std::size_t e = 0; e < n; ++e) g[e] = t * lr[e] + q * fam.values[e];
  const auto st = gibbs_state(spec, fam, t, q);
  double log_p;  // pressure of the (truncated) system the state lives on
  if (spec.full_shift()) {
    double m = *std::max_element(g.begin(), g.end());
    double a0 = 0.0;
    for (double ge : g) a0 += std::exp(ge - m);
    log_p = m + std::log(a0);
  } else {
    log_p = detail::perron_power_iteration(spec, g).log_rho;
  }

  GibbsInequalityResult res;
  // DFS over admissible words; each frame carries the accumulated measure
  // and Birkhoff sum of the word it represents.
  struct Frame {
    std::size_t sym;
    std::size_t depth;
    double log_mu;
    double s;
  };
  std::vector<Frame> stack;
  for (std::size_t e = 0; e < n; ++e)
    stack.push_back({e, 1, std::log(st.stationary[e]), g[e]});
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    const double ratio =
        std::exp(fr.log_mu - fr.s + log_p * static_cast<double>(fr.depth));
    res.c_min = std::min(res.c_min, ratio);
    res.c_max = std::max(res.c_max, ratio);
    ++res.words_checked;
    if (fr.depth == word_len) continue;
    for (std::size_t b = 0; b < n; ++b) {
      const bool adm = spec.full_shift() || spec.incidence[fr.sym][b] != 0;
      if (!adm) continue;
      const double step = spec.full_shift()
                              ? std::log(st.stationary[b])
                              : std::log(st.transition[fr.sym][b]);
      stack.push_back({b, fr.depth + 1, fr.log_mu + step, fr.s + g[b]});
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Karp mean-cycle oracles over the incidence graph with node weights f_a
// charged on the source of each edge.  Full shifts reduce to min/max f_e.
// ---------------------------------------------------------------------------
namespace detail {

inline double karp_min_mean_cycle(const SystemSpec& spec,
                                  const std::vector<double>& weight) {
  const std::size_t n = spec.size();
  constexpr double inf = kPosInf;
  std::vector<std::vector<double>> d(n + 1, std::vector<double>(n, inf));
  d[0].assign(n, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t a = 0; a < n; ++a) {
      if (d[k - 1][a] == inf) continue;
      const double base = d[k - 1][a] + weight[a];
      for (std::size_t b = 0; b < n; ++b) {
        if (spec.incidence[a][b] && base < d[k][b]) d[k][b] = base;
      }
    }
  }
  double best = inf;
  for (std::size_t v = 0; v < n; ++v) {
    if (d[n][v] == inf) continue;
    double worst = kNegInf;
    for (std::size_t k = 0; k < n; ++k) {
      if (d[k][v] == inf) continue;
      worst = std::max(worst,
                       (d[n][v] - d[k][v]) / static_cast<double>(n - k));
    }
    best = std::min(best, worst);
  }
  if (best == inf) throw SolverError("incidence graph has no cycle");
  return best;
}

}  // namespace detail

// Minimum Birkhoff average of f over periodic orbits (the left edge of the
// attainable exponent range).
inline double min_average_oracle(const SystemSpec& spec,
                                 const PotentialFamily& fam) {
  if (spec.full_shift())
    return *std::min_element(fam.values.begin(), fam.values.end());
  return detail::karp_min_mean_cycle(spec, fam.values);
}

// Maximum Birkhoff average of f over periodic orbits.
inline double max_average_oracle(const SystemSpec& spec,
                                 const PotentialFamily& fam) {
  if (spec.full_shift())
    return *std::max_element(fam.values.begin(), fam.values.end());
  std::vector<double> neg(fam.values.size());
  for (std::size_t e = 0; e < neg.size(); ++e) neg[e] = -fam.values[e];
  return -detail::karp_min_mean_cycle(spec, neg);
}

// ---------------------------------------------------------------------------
// zero_temperature_limit: f-exponent and entropy along a strictly
// decreasing q-sequence; the exponent trace is non-increasing and converges
// to the minimum mean cycle.
// ---------------------------------------------------------------------------
struct ZeroTempPoint {
  double q = 0.0;
  double f_exponent = 0.0;
  double entropy = 0.0;
};

struct ZeroTemperatureTrace {
  std::vector<ZeroTempPoint> points;
  bool clamped = false;
  double q_floor = 0.0;
};

inline ZeroTemperatureTrace zero_temperature_limit(
    const SystemSpec& spec, const PotentialFamily& fam, double t,
    const std::vector<double>& q_sequence) {
  if (q_sequence.empty())
    throw ValidationError("q_sequence must not be empty");
  for (std::size_t i = 1; i < q_sequence.size(); ++i) {
    if (!(q_sequence[i] < q_sequence[i - 1]))
      throw ValidationError("q_sequence must be strictly decreasing");
  }
  ZeroTemperatureTrace trace;
  trace.q_floor = detail::q_floor(fam);
  for (double q : q_sequence) {
    if (q < trace.q_floor) {
      // Clamp to the deepest numerically safe point, then stop.
      trace.clamped = true;
      q = trace.q_floor;
      if (!trace.points.empty() && trace.points.back().q <= q) break;
    }
    const auto st = gibbs_state(spec, fam, t, q);
    trace.points.push_back({q, st.f_exponent, st.entropy});
    if (trace.clamped) break;
  }
  return trace;
}

}  // namespace mfspec
