// Perron data for Markov systems: the weighted incidence matrix
//   M_{ab} = A_{ab} * r_a^t * exp(q f_a)
// is first balanced by a diagonal similarity in log space (so its entries
// and its spectral radius stay of comparable size even when the weights
// span hundreds of orders of magnitude, e.g. deep in q), then max-shifted,
// and its spectral radius and left/right Perron vectors are obtained by
// power iteration on M' + I (the +I keeps periodic incidence matrices
// convergent).  The root is read off as the bilinear Rayleigh quotient
// u^T M' v / u^T v on the unshifted matrix, avoiding any (1+rho)-1
// cancellation.
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "core.hpp"
#include "system.hpp"

namespace mfspec::detail {

// The returned vectors belong to the *balanced, shifted* matrix
//   M'_{ab} = exp(g_a + x_b - x_a - shift),
// whose spectral radius is rho_shifted; log_rho = shift + log(rho_shifted)
// is the log spectral radius of the original matrix.  Similarity-invariant
// quantities (the stationary product left_a * right_a, transition
// probabilities, the spectral radius) can be formed from these directly.
struct PerronResult {
  double log_rho = 0.0;
  double shift = 0.0;         // max balanced log entry
  double rho_shifted = 0.0;   // spectral radius of M' (order 1 by design)
  std::vector<double> right;  // positive Perron vectors of M',
  std::vector<double> left;   // L1-normalized
  std::vector<double> balance;  // diagonal exponents x_a
  int iterations = 0;
};

inline constexpr double kPerronTol = 1e-13;
inline constexpr int kPerronMaxIter = 100000;

// g[a] = t log r_a + q f_a are the per-symbol log weights.
inline PerronResult perron_power_iteration(const SystemSpec& spec,
                                           const std::vector<double>& g) {
  const std::size_t n = spec.size();
  PerronResult res;
  res.balance.assign(n, 0.0);
  auto& x = res.balance;

  // Balancing sweeps: equalize each node's largest outgoing and incoming
  // log weight.  L_{ab} = g_a + x_b - x_a; raising x_a lowers row a and
  // raises column a, so the fixed point has them equal.
  const int sweeps = static_cast<int>(std::min<std::size_t>(4 * n + 32, 512));
  for (int s = 0; s < sweeps; ++s) {
    double moved = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      double row = kNegInf, col = kNegInf;
      for (std::size_t b = 0; b < n; ++b) {
        if (spec.incidence[a][b]) row = std::max(row, g[a] + x[b]);
        if (spec.incidence[b][a]) col = std::max(col, g[b] - x[b]);
      }
      if (row == kNegInf || col == kNegInf) continue;  // reducible corner
      const double delta = 0.5 * ((row - x[a]) - (col + x[a]));
      x[a] += delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-6) break;
  }

  double m = kNegInf;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (spec.incidence[a][b]) m = std::max(m, g[a] + x[b] - x[a]);
    }
  }
  res.shift = m;

  std::vector<double> w(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (spec.incidence[a][b]) w[a * n + b] = std::exp(g[a] + x[b] - x[a] - m);
    }
  }

  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  std::vector<double> u(n, 1.0 / static_cast<double>(n));
  std::vector<double> mv(n), mtu(n);

  auto apply = [&](const std::vector<double>& in, std::vector<double>& out,
                   bool transpose) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      const double* row = &w[a * n];
      if (!transpose) {
        double acc = 0.0;
        for (std::size_t b = 0; b < n; ++b) acc += row[b] * in[b];
        out[a] = acc;
      } else {
        const double ia = in[a];
        for (std::size_t b = 0; b < n; ++b) out[b] += row[b] * ia;
      }
    }
  };

  for (int it = 1; it <= kPerronMaxIter; ++it) {
    apply(v, mv, false);
    apply(u, mtu, true);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += u[i] * mv[i];
      den += u[i] * v[i];
    }
    if (!(den > 0.0)) {
      throw SolverError(
          "power iteration degenerated (is the incidence irreducible?)");
    }
    const double rho = num / den;
    res.iterations = it;
    // Accept on the componentwise eigen-residual of *both* vectors.  (The
    // Rayleigh quotient converges twice as fast as the vectors, so testing
    // rho alone would hand back vectors far less accurate than rho itself;
    // downstream transition probabilities are built from the vectors.)
    if (rho > 0.0) {
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(mv[i] - rho * v[i]) / (rho * v[i]));
        worst = std::max(worst, std::abs(mtu[i] - rho * u[i]) / (rho * u[i]));
      }
      if (worst <= kPerronTol) {
        res.rho_shifted = rho;
        res.log_rho = m + std::log(rho);
        double sv = 0.0, su = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          sv += v[i];
          su += u[i];
        }
        res.right = v;
        res.left = u;
        for (std::size_t i = 0; i < n; ++i) {
          res.right[i] /= sv;
          res.left[i] /= su;
        }
        return res;
      }
    }
    // (M' + I) step, renormalized in L1 (all entries stay positive).
    double sv = 0.0, su = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] += mv[i];
      u[i] += mtu[i];
      sv += v[i];
      su += u[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      v[i] /= sv;
      u[i] /= su;
    }
  }
  throw SolverError("power iteration did not converge after " +
                    std::to_string(kPerronMaxIter) + " iterations");
}

}  // namespace mfspec::detail
