// Deterministic result serialization.  CSV payloads carry nothing but data
// rows printed with round-trip precision, so rerunning a command on the
// same input produces byte-identical files.  Each CSV gets a JSON sidecar
// with the resolved model, grid and solver settings (schema version 1); the
// sidecar holds no timestamps, hostnames or other run-specific noise.
#pragma once

#include <json.hpp>

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "core.hpp"
#include "gibbs.hpp"
#include "pressure.hpp"
#include "spectrum.hpp"
#include "system.hpp"

namespace mfspec {

using json = nlohmann::ordered_json;

namespace detail {

// JSON has no inf/nan literals; keep them readable as strings.
inline json num(double x) {
  if (std::isfinite(x)) return json(x);
  return json(format_g17(x));
}

}  // namespace detail

inline json tail_to_json(const TailModel& tail) {
  if (tail.kind == TailKind::none) return json(nullptr);
  json j;
  j["kind"] = tail.kind == TailKind::geometric ? "geometric" : "power_law";
  j["c_lo"] = detail::num(tail.c_lo);
  j["c_hi"] = detail::num(tail.c_hi);
  if (tail.kind == TailKind::geometric) j["alpha"] = detail::num(tail.alpha);
  if (tail.kind == TailKind::power_law) j["p"] = detail::num(tail.p);
  j["exact"] = tail.exact;
  return j;
}

inline json model_to_json(const std::string& name, const SystemSpec& spec,
                          const PotentialFamily& family) {
  json j;
  j["name"] = name;
  j["symbols"] = spec.size();
  j["markov"] = !spec.full_shift();
  j["infinite"] = spec.infinite;
  j["tail"] = tail_to_json(spec.tail);
  json f;
  f["lyapunov"] = family.lyapunov;
  f["bounded"] = family.bounded;
  f["lower_bound"] = detail::num(family.lower_bound);
  if (family.comparability) {
    f["comparability"] = {detail::num((*family.comparability)[0]),
                          detail::num((*family.comparability)[1]),
                          detail::num((*family.comparability)[2])};
  } else {
    f["comparability"] = nullptr;
  }
  j["family"] = f;
  return j;
}

inline json range_to_json(const ExponentRange& range) {
  json j;
  j["theta"] = detail::num(range.theta);
  j["h"] = detail::num(range.h);
  j["xi_min"] = detail::num(range.xi_min);
  j["xi_zero"] = detail::num(range.xi_zero);
  j["xi_max"] = detail::num(range.xi_max);
  j["degenerate"] = range.degenerate;
  return j;
}

// ---------------------------------------------------------------------------
// CSV payloads.
// ---------------------------------------------------------------------------
inline void write_spectrum_csv(std::ostream& out, const SpectrumCurve& curve) {
  out << "xi,t,q,pressure,residual_w,residual_grad,flags\n";
  for (const auto& p : curve.points) {
    out << format_g17(p.xi) << ',' << format_g17(p.t) << ','
        << format_g17(p.q) << ',' << format_g17(p.pressure) << ','
        << format_g17(p.residual_w) << ',' << format_g17(p.residual_grad)
        << ',' << p.flags << '\n';
  }
}

inline void write_pressure_csv(std::ostream& out,
                               const std::vector<PressurePoint>& points) {
  out << "t,q,in_region,value,dp_dt,dp_dq,d2_tt,d2_tq,d2_qq,tail_error\n";
  for (const auto& p : points) {
    out << format_g17(p.t) << ',' << format_g17(p.q) << ','
        << (p.in_region ? 1 : 0) << ',' << format_g17(p.value) << ','
        << format_g17(p.dp_dt) << ',' << format_g17(p.dp_dq) << ','
        << format_g17(p.d2_tt) << ',' << format_g17(p.d2_tq) << ','
        << format_g17(p.d2_qq) << ',' << format_g17(p.tail_error) << '\n';
  }
}

inline void write_gibbs_csv(std::ostream& out, const SystemSpec& spec,
                            const PotentialFamily& family,
                            const GibbsState& state) {
  out << "symbol,ratio,f_value,stationary\n";
  for (std::size_t a = 0; a < spec.size(); ++a) {
    out << (a + 1) << ',' << format_g17(spec.ratios[a]) << ','
        << format_g17(family.values[a]) << ','
        << format_g17(state.stationary[a]) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sidecar metadata.
// ---------------------------------------------------------------------------
inline json spectrum_meta_json(const std::string& name, const SystemSpec& spec,
                               const PotentialFamily& family,
                               const GridSpec& grid, const OuterOptions& opts,
                               const SpectrumCurve& curve) {
  json j;
  j["schema"] = 1;
  j["kind"] = "spectrum";
  j["model"] = model_to_json(name, spec, family);
  j["range"] = range_to_json(curve.range);
  json g;
  g["count"] = grid.count;
  g["xi_lo"] = grid.xi_lo ? detail::num(*grid.xi_lo) : json(nullptr);
  g["xi_hi"] = grid.xi_hi ? detail::num(*grid.xi_hi) : json(nullptr);
  g["xi_cap"] = detail::num(grid.xi_cap);
  g["margin"] = detail::num(grid.margin);
  j["grid"] = g;
  json s;
  s["tol_w"] = detail::num(opts.tol_w);
  s["tol_grad"] = detail::num(opts.tol_grad);
  s["max_bisect"] = opts.max_bisect;
  j["solver"] = s;
  double worst_w = 0.0, worst_g = 0.0;
  unsigned all_flags = 0;
  for (const auto& p : curve.points) {
    if (p.ok()) {
      worst_w = std::max(worst_w, std::abs(p.residual_w));
      worst_g = std::max(worst_g, std::abs(p.residual_grad));
    }
    all_flags |= p.flags;
  }
  json r;
  r["points"] = curve.points.size();
  r["failed"] = curve.n_failed;
  r["max_residual_w"] = detail::num(worst_w);
  r["max_residual_grad"] = detail::num(worst_g);
  r["flags_union"] = all_flags;
  j["results"] = r;
  return j;
}

inline json pressure_meta_json(const std::string& name, const SystemSpec& spec,
                               const PotentialFamily& family,
                               const std::vector<PressurePoint>& points) {
  json j;
  j["schema"] = 1;
  j["kind"] = "pressure_surface";
  j["model"] = model_to_json(name, spec, family);
  std::size_t inside = 0;
  double worst_tail = 0.0;
  for (const auto& p : points) {
    if (p.in_region) {
      ++inside;
      worst_tail = std::max(worst_tail, p.tail_error);
    }
  }
  json r;
  r["points"] = points.size();
  r["in_region"] = inside;
  r["max_tail_error"] = detail::num(worst_tail);
  j["results"] = r;
  return j;
}

inline json gibbs_meta_json(const std::string& name, const SystemSpec& spec,
                            const PotentialFamily& family, double t, double q,
                            const GibbsState& state, double variational) {
  json j;
  j["schema"] = 1;
  j["kind"] = "gibbs";
  j["model"] = model_to_json(name, spec, family);
  json r;
  r["t"] = detail::num(t);
  r["q"] = detail::num(q);
  r["entropy"] = detail::num(state.entropy);
  r["lyapunov"] = detail::num(state.lyapunov);
  r["f_exponent"] = detail::num(state.f_exponent);
  r["dimension"] = detail::num(state.dimension);
  r["variational_residual"] = detail::num(variational);
  j["results"] = r;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << body;
  if (!out) throw ValidationError("failed writing output file: " + path);
}

}  // namespace mfspec
