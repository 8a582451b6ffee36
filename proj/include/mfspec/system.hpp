// System and potential-family descriptions: contraction ratios over a finite
// or truncated-infinite alphabet, optional 0/1 incidence (full shift when
// absent), optional branch intervals, and the declared tail behaviour used
// to bound everything beyond the truncation.  Plus the structural
// operations: validation, finite irreducibility, family translation.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace mfspec {

enum class TailKind { none, geometric, power_law };

// Two-sided decay model for the contraction ratios beyond (and across) the
// truncation window, indexed 1-based:
//   geometric:  c_lo * exp(-alpha*n) <= r_n <= c_hi * exp(-alpha*n)
//   power_law:  c_lo * n^-p          <= r_n <= c_hi * n^-p
// `exact` asserts r_n == c_hi * profile(n) for every n (then c_lo == c_hi),
// which unlocks closed-form remainder summation instead of error bounds.
struct TailModel {
  TailKind kind = TailKind::none;
  double c_lo = 1.0;
  double c_hi = 1.0;
  double alpha = 0.0;  // geometric decay rate
  double p = 0.0;      // power-law exponent
  bool exact = false;
};

struct Interval {
  double left = 0.0;
  double right = 0.0;
};

// A conformal system with affine branches: one contraction ratio per symbol.
// incidence empty <=> full shift.  When `infinite` is set the stored data is
// the truncation to the first ratios.size() symbols and `tail` must describe
// the rest of the alphabet.
struct SystemSpec {
  std::vector<double> ratios;
  std::vector<std::vector<std::uint8_t>> incidence;
  std::vector<Interval> intervals;  // optional placement data
  bool infinite = false;
  TailModel tail;

  bool full_shift() const noexcept { return incidence.empty(); }
  std::size_t size() const noexcept { return ratios.size(); }
};

// A locally constant (depth-1) potential family: one value f_e > 0 per
// symbol.  Metadata describes behaviour beyond the truncation window:
//  - lyapunov: f_e == -log r_e exactly (tail inherits the ratio model);
//  - comparability (a,b,g): -a log r_e + g <= f_e <= -a log r_e + b;
//  - bounded: sup_e f_e declared finite.
struct PotentialFamily {
  std::vector<double> values;
  double lower_bound = 0.0;
  bool bounded = false;
  bool lyapunov = false;
  std::optional<std::array<double, 3>> comparability;  // (a, b, g)
};

// Builds the family f_e = -log r_e ("Lyapunov weights") for a system.
inline PotentialFamily lyapunov_family(const SystemSpec& spec) {
  PotentialFamily fam;
  fam.values.reserve(spec.size());
  double lo = kPosInf;
  double hi = kNegInf;
  for (double r : spec.ratios) {
    const double f = -std::log(r);
    fam.values.push_back(f);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  fam.lower_bound = lo;
  fam.bounded = !spec.infinite;  // infinite alphabets have r_e -> 0
  fam.lyapunov = true;
  fam.comparability = std::array<double, 3>{1.0, 0.0, 0.0};
  return fam;
}

// ---------------------------------------------------------------------------
// validate_system: structural checks, reported as data (never thrown).
// ---------------------------------------------------------------------------
inline std::vector<std::string> validate_system(const SystemSpec& spec) {
  std::vector<std::string> violations;
  const std::size_t n = spec.size();
  if (n == 0) {
    violations.push_back("alphabet is empty");
    return violations;
  }
  for (std::size_t e = 0; e < n; ++e) {
    const double r = spec.ratios[e];
    if (!(r > 0.0) || !(r < 1.0) || !std::isfinite(r)) {
      violations.push_back("ratio[" + std::to_string(e + 1) + "] = " +
                           format_g17(r) + " is not in (0,1)");
    }
  }
  if (!spec.incidence.empty()) {
    if (spec.incidence.size() != n) {
      violations.push_back("incidence matrix has " +
                           std::to_string(spec.incidence.size()) +
                           " rows for " + std::to_string(n) + " symbols");
    }
    for (std::size_t a = 0; a < spec.incidence.size(); ++a) {
      const auto& row = spec.incidence[a];
      if (row.size() != n) {
        violations.push_back("incidence row " + std::to_string(a + 1) +
                             " has length " + std::to_string(row.size()));
        continue;
      }
      bool any = false;
      for (std::size_t b = 0; b < n; ++b) {
        if (row[b] != 0 && row[b] != 1) {
          violations.push_back("incidence[" + std::to_string(a + 1) + "][" +
                               std::to_string(b + 1) + "] is not 0/1");
        }
        any = any || row[b] != 0;
      }
      if (!any) {
        violations.push_back("incidence row " + std::to_string(a + 1) +
                             " has no admissible successor");
      }
    }
  }
  if (!spec.intervals.empty()) {
    if (spec.intervals.size() != n) {
      violations.push_back("interval list has " +
                           std::to_string(spec.intervals.size()) +
                           " entries for " + std::to_string(n) + " symbols");
    } else {
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return spec.intervals[a].left < spec.intervals[b].left;
      });
      for (std::size_t e = 0; e < n; ++e) {
        const auto& iv = spec.intervals[e];
        if (!(iv.left < iv.right)) {
          violations.push_back("interval[" + std::to_string(e + 1) +
                               "] is empty or reversed");
        }
      }
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto& a = spec.intervals[order[i]];
        const auto& b = spec.intervals[order[i + 1]];
        if (a.right > b.left) {  // shared endpoints allowed; interiors not
          violations.push_back(
              "intervals of symbols " + std::to_string(order[i] + 1) + " and " +
              std::to_string(order[i + 1] + 1) + " have overlapping interiors");
        }
      }
    }
  }
  if (spec.infinite) {
    const TailModel& tm = spec.tail;
    if (tm.kind == TailKind::none) {
      violations.push_back("infinite alphabet declared without a tail model");
    } else {
      if (!(tm.c_lo > 0.0) || !(tm.c_hi >= tm.c_lo)) {
        violations.push_back("tail constants must satisfy 0 < c_lo <= c_hi");
      }
      if (tm.kind == TailKind::geometric && !(tm.alpha > 0.0)) {
        violations.push_back("geometric tail needs alpha > 0");
      }
      if (tm.kind == TailKind::power_law && !(tm.p > 0.0)) {
        violations.push_back("power-law tail needs p > 0");
      }
      if (tm.exact && tm.c_lo != tm.c_hi) {
        violations.push_back("exact tail model requires c_lo == c_hi");
      }
      // The declared envelope must actually contain the stored ratios.
      const double slack = 1e-9;
      for (std::size_t e = 0; e < n; ++e) {
        const double idx = static_cast<double>(e + 1);
        const double profile = tm.kind == TailKind::geometric
                                   ? std::exp(-tm.alpha * idx)
                                   : std::pow(idx, -tm.p);
        const double lo = tm.c_lo * profile;
        const double hi = tm.c_hi * profile;
        const double r = spec.ratios[e];
        const bool inside = r >= lo * (1.0 - slack) && r <= hi * (1.0 + slack);
        const bool exact_ok = !tm.exact || std::abs(r - hi) <= slack * hi;
        if (!inside || !exact_ok) {
          violations.push_back("ratio[" + std::to_string(e + 1) +
                               "] violates the declared tail envelope");
          break;  // one witness is enough
        }
      }
    }
  } else if (spec.tail.kind != TailKind::none) {
    violations.push_back("finite alphabet carries a tail model");
  }
  if (spec.infinite && !spec.incidence.empty()) {
    violations.push_back(
        "truncated infinite alphabets are supported for full shifts only");
  }
  return violations;
}

// Keeps the first n symbols of a truncated-infinite system (same tail
// declaration); used to test the stability of results under truncation.
inline SystemSpec truncate_system(const SystemSpec& spec, std::size_t n) {
  if (n < 2 || n > spec.size())
    throw ValidationError("truncation must keep between 2 and " +
                          std::to_string(spec.size()) + " symbols");
  SystemSpec out = spec;
  out.ratios.resize(n);
  if (!out.intervals.empty()) out.intervals.resize(n);
  return out;
}

inline PotentialFamily truncate_family(const PotentialFamily& fam,
                                       std::size_t n) {
  if (n < 2 || n > fam.values.size())
    throw ValidationError("truncation must keep between 2 and " +
                          std::to_string(fam.values.size()) + " values");
  PotentialFamily out = fam;
  out.values.resize(n);
  return out;
}

// Family-side structural checks (used by the CLI before any evaluation).
inline std::vector<std::string> validate_family(const SystemSpec& spec,
                                                const PotentialFamily& fam) {
  std::vector<std::string> violations;
  if (fam.values.size() != spec.size()) {
    violations.push_back("family has " + std::to_string(fam.values.size()) +
                         " values for " + std::to_string(spec.size()) +
                         " symbols");
    return violations;
  }
  for (std::size_t e = 0; e < fam.values.size(); ++e) {
    if (!(fam.values[e] > 0.0) || !std::isfinite(fam.values[e])) {
      violations.push_back("potential value[" + std::to_string(e + 1) +
                           "] = " + format_g17(fam.values[e]) +
                           " is not strictly positive");
    }
  }
  if (spec.infinite && !fam.lyapunov && !fam.bounded && !fam.comparability) {
    violations.push_back(
        "infinite alphabet: family must declare lyapunov, bounded, or "
        "comparability tail behaviour");
  }
  return violations;
}

// ---------------------------------------------------------------------------
// check_finite_irreducibility: every ordered symbol pair (a,b) must be
// joinable by a connecting word aτb with |τ| <= max_word_len.  The witness
// set collects the distinct connecting words (ε for directly admissible
// pairs).  Full shifts are trivially irreducible with witness {ε}.
// ---------------------------------------------------------------------------
struct IrreducibilityReport {
  bool irreducible = false;
  // Distinct connecting words, each a list of 1-based symbol labels;
  // the empty word is represented by an empty vector.
  std::vector<std::vector<std::size_t>> witnesses;
  // First pair (1-based) that cannot be connected, when irreducible == false.
  std::optional<std::pair<std::size_t, std::size_t>> failing_pair;
  std::string note;
};

inline IrreducibilityReport check_finite_irreducibility(
    const SystemSpec& spec, std::size_t max_word_len = 0) {
  IrreducibilityReport report;
  const std::size_t n = spec.size();
  if (max_word_len == 0) max_word_len = n;
  if (spec.full_shift()) {
    report.irreducible = true;
    report.witnesses.push_back({});  // ε joins every pair
    return report;
  }
  // Pairwise witnesses are quadratic; above this size fall back to plain
  // strong-connectivity (forward/backward reachability from symbol 1).
  constexpr std::size_t kWitnessCap = 512;
  if (n > kWitnessCap) {
    auto reach = [&](bool forward) {
      std::vector<char> seen(n, 0);
      std::deque<std::size_t> queue{0};
      seen[0] = 1;
      while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t w = 0; w < n; ++w) {
          const bool edge = forward ? spec.incidence[v][w] != 0
                                    : spec.incidence[w][v] != 0;
          if (edge && !seen[w]) {
            seen[w] = 1;
            queue.push_back(w);
          }
        }
      }
      return seen;
    };
    const auto fwd = reach(true);
    const auto bwd = reach(false);
    for (std::size_t v = 0; v < n; ++v) {
      if (!fwd[v] || !bwd[v]) {
        report.failing_pair = {fwd[v] ? v + 1 : 1, fwd[v] ? 1 : v + 1};
        return report;
      }
    }
    report.irreducible = true;
    report.note = "alphabet too large for pairwise witnesses; "
                  "strong connectivity verified instead";
    return report;
  }
  std::set<std::vector<std::size_t>> distinct;
  for (std::size_t a = 0; a < n; ++a) {
    // BFS over edges from a, recording predecessors for word reconstruction.
    std::vector<std::ptrdiff_t> pred(n, -2);  // -2 unvisited, -1 root edge
    std::vector<std::size_t> dist(n, 0);
    std::deque<std::size_t> queue;
    for (std::size_t b = 0; b < n; ++b) {
      if (spec.incidence[a][b]) {
        pred[b] = -1;
        dist[b] = 1;
        queue.push_back(b);
      }
    }
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t w = 0; w < n; ++w) {
        if (spec.incidence[v][w] && pred[w] == -2) {
          pred[w] = static_cast<std::ptrdiff_t>(v);
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
      }
    }
    for (std::size_t b = 0; b < n; ++b) {
      if (pred[b] == -2 || dist[b] - 1 > max_word_len) {
        report.failing_pair = {a + 1, b + 1};
        return report;
      }
      std::vector<std::size_t> word;  // interior symbols of the a->...->b path
      for (std::size_t v = b; pred[v] >= 0;) {
        v = static_cast<std::size_t>(pred[v]);
        word.push_back(v + 1);
      }
      std::reverse(word.begin(), word.end());
      distinct.insert(std::move(word));
    }
  }
  report.irreducible = true;
  report.witnesses.assign(distinct.begin(), distinct.end());
  return report;
}

// ---------------------------------------------------------------------------
// translate_family: F -> F + a, shifting every value, the lower bound and
// the comparability band.  An exact Lyapunov link does not survive a nonzero
// shift; it degrades to the comparability band (1, a, a).
// ---------------------------------------------------------------------------
inline PotentialFamily translate_family(const PotentialFamily& fam, double a) {
  PotentialFamily out = fam;
  for (double& v : out.values) v += a;
  out.lower_bound += a;
  if (out.comparability) {
    (*out.comparability)[1] += a;
    (*out.comparability)[2] += a;
  }
  if (a != 0.0 && out.lyapunov) {
    out.lyapunov = false;
    if (!out.comparability) out.comparability = std::array<double, 3>{1.0, a, a};
  }
  return out;
}

}  // namespace mfspec
