// Command-line front end.
//
//   mfspec list-builtins
//   mfspec spectrum         --system NAME | --config FILE  [grid options]
//   mfspec pressure-surface --system NAME | --config FILE  --t-range a:b:n ...
//   mfspec gibbs            --system NAME | --config FILE  --t X --q Y
//   mfspec diagnostics      --system NAME | --config FILE  [--tol-tail T]
//
// Exit codes: 0 success, 2 invalid input or model, 3 solver failure,
// 4 diagnostics failure (results exist but should not be trusted).
// All output is deterministic: rerunning a command reproduces stdout and
// any written files byte for byte.

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mfspec/builtin.hpp"
#include "mfspec/config.hpp"
#include "mfspec/core.hpp"
#include "mfspec/gibbs.hpp"
#include "mfspec/output.hpp"
#include "mfspec/pressure.hpp"
#include "mfspec/spectrum.hpp"
#include "mfspec/system.hpp"

namespace {

using namespace mfspec;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitSolver = 3;
constexpr int kExitDiagnostics = 4;

struct ModelOptions {
  std::string builtin;
  std::string config_path;
  std::string family_override;
  std::optional<std::size_t> truncation;
};

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
  auto* sys = cmd->add_option("--system", opts.builtin,
                              "builtin system name (see list-builtins)");
  auto* cfg = cmd->add_option("--config", opts.config_path,
                              "INI model description file");
  sys->excludes(cfg);
  cmd->add_option("--truncation", opts.truncation,
                  "override the stored alphabet size of a builtin");
  cmd->add_option("--family", opts.family_override,
                  "override the potential family ('lyapunov')")
      ->check(CLI::IsMember({"lyapunov"}));
}

ModelConfig resolve_model(const ModelOptions& opts) {
  ModelConfig cfg;
  if (!opts.builtin.empty()) {
    BuiltinSystem b = make_builtin(opts.builtin, opts.truncation);
    cfg.name = std::move(b.name);
    cfg.system = std::move(b.system);
    cfg.family = std::move(b.family);
  } else if (!opts.config_path.empty()) {
    cfg = load_model_config(opts.config_path);
    if (opts.truncation) {
      cfg.system = truncate_system(cfg.system, *opts.truncation);
      cfg.family = cfg.family.lyapunov ? lyapunov_family(cfg.system)
                                       : truncate_family(cfg.family,
                                                         *opts.truncation);
    }
  } else {
    throw ValidationError("either --system or --config is required");
  }
  if (opts.family_override == "lyapunov")
    cfg.family = lyapunov_family(cfg.system);
  auto violations = validate_system(cfg.system);
  const auto fv = validate_family(cfg.system, cfg.family);
  violations.insert(violations.end(), fv.begin(), fv.end());
  if (!violations.empty()) {
    std::string msg = "invalid model:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ValidationError(msg);
  }
  return cfg;
}

void print_kv(const char* key, double value) {
  std::printf("%s=%s ", key, format_g17(value).c_str());
}

void print_model_line(const ModelConfig& cfg) {
  std::printf("model=%s symbols=%zu markov=%d infinite=%d\n", cfg.name.c_str(),
              cfg.system.size(), cfg.system.full_shift() ? 0 : 1,
              cfg.system.infinite ? 1 : 0);
}

void print_range_line(const ExponentRange& range) {
  print_kv("theta", range.theta);
  print_kv("h", range.h);
  print_kv("xi_min", range.xi_min);
  print_kv("xi_zero", range.xi_zero);
  print_kv("xi_max", range.xi_max);
  std::printf("degenerate=%d\n", range.degenerate ? 1 : 0);
}

// "lo:hi:count" -> linear grid; a single number is a one-point grid.
std::vector<double> parse_axis(const std::string& text, const char* flag) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(':', pos);
    parts.push_back(text.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  try {
    if (parts.size() == 1) return {std::stod(parts[0])};
    if (parts.size() == 3) {
      const double lo = std::stod(parts[0]);
      const double hi = std::stod(parts[1]);
      const long n = std::stol(parts[2]);
      if (n < 2 || !(lo < hi))
        throw ValidationError(std::string(flag) +
                              " needs lo < hi and count >= 2");
      std::vector<double> xs(static_cast<std::size_t>(n));
      for (long i = 0; i < n; ++i)
        xs[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      return xs;
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    // fall through to the format error below
  }
  throw ValidationError(std::string(flag) + " must be 'value' or 'lo:hi:count'");
}

void write_with_meta(const std::string& path, const std::string& csv,
                     const json& meta) {
  write_text_file(path, csv);
  write_text_file(path + ".meta.json", meta.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
int run_list_builtins() {
  for (const auto& info : builtin_registry()) {
    std::printf("%-38s %s\n", info.name.c_str(), info.summary.c_str());
    if (info.default_truncation)
      std::printf("%-38s (stored alphabet: %zu symbols by default)\n", "",
                  info.default_truncation);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
struct SpectrumOptions {
  ModelOptions model;
  GridSpec grid;
  double tol_root = 1e-10;
  double tol_grad = 1e-9;
  std::string out;
  std::optional<double> xi_lo, xi_hi;
};

int run_spectrum(const SpectrumOptions& so) {
  ModelConfig cfg = resolve_model(so.model);
  GridSpec grid = so.grid;
  grid.xi_lo = so.xi_lo;
  grid.xi_hi = so.xi_hi;
  OuterOptions opts;
  opts.tol_w = so.tol_root;
  opts.tol_grad = so.tol_grad;

  const ExponentRange range = exponent_range(cfg.system, cfg.family);
  const SpectrumCurve curve =
      sample_spectrum(cfg.system, cfg.family, range, grid, opts);

  print_model_line(cfg);
  print_range_line(range);
  double worst_w = 0.0, worst_g = 0.0;
  unsigned all_flags = 0;
  for (const auto& p : curve.points) {
    if (p.ok()) {
      worst_w = std::max(worst_w, std::abs(p.residual_w));
      worst_g = std::max(worst_g, std::abs(p.residual_grad));
    }
    all_flags |= p.flags;
  }
  std::printf("points=%zu failed=%zu ", curve.points.size(), curve.n_failed);
  print_kv("max_residual_w", worst_w);
  print_kv("max_residual_grad", worst_g);
  std::printf("flags_union=%u\n", all_flags);

  if (!so.out.empty()) {
    std::ostringstream csv;
    write_spectrum_csv(csv, curve);
    write_with_meta(so.out, csv.str(),
                    spectrum_meta_json(cfg.name, cfg.system, cfg.family, grid,
                                       opts, curve));
  }
  return curve.n_failed == 0 ? kExitOk : kExitDiagnostics;
}

// ---------------------------------------------------------------------------
struct PressureOptions {
  ModelOptions model;
  std::string t_axis, q_axis;
  std::string out;
};

int run_pressure_surface(const PressureOptions& po) {
  ModelConfig cfg = resolve_model(po.model);
  const auto ts = parse_axis(po.t_axis, "--t-range");
  const auto qs = parse_axis(po.q_axis, "--q-range");
  std::vector<PressurePoint> points;
  points.reserve(ts.size() * qs.size());
  for (const double t : ts)
    for (const double q : qs) points.push_back(pressure(cfg.system, cfg.family, t, q));

  print_model_line(cfg);
  std::size_t inside = 0;
  double worst_tail = 0.0;
  for (const auto& p : points) {
    if (p.in_region) {
      ++inside;
      worst_tail = std::max(worst_tail, p.tail_error);
    }
  }
  std::printf("points=%zu in_region=%zu ", points.size(), inside);
  print_kv("max_tail_error", worst_tail);
  std::printf("\n");
  if (points.size() == 1 && points[0].in_region) {
    const auto& p = points[0];
    print_kv("value", p.value);
    print_kv("dp_dt", p.dp_dt);
    print_kv("dp_dq", p.dp_dq);
    std::printf("\n");
  }

  if (!po.out.empty()) {
    std::ostringstream csv;
    write_pressure_csv(csv, points);
    write_with_meta(po.out, csv.str(),
                    pressure_meta_json(cfg.name, cfg.system, cfg.family, points));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
struct GibbsOptions {
  ModelOptions model;
  double t = 0.0;
  double q = 0.0;
  std::string out;
};

int run_gibbs(const GibbsOptions& go) {
  ModelConfig cfg = resolve_model(go.model);
  const auto pt = pressure(cfg.system, cfg.family, go.t, go.q);
  if (!pt.in_region)
    throw ValidationError("(t, q) = (" + format_g17(go.t) + ", " +
                          format_g17(go.q) +
                          ") lies outside the convergence region");
  const GibbsState state = gibbs_state(cfg.system, cfg.family, go.t, go.q);
  const double variational =
      variational_check(cfg.system, cfg.family, go.t, go.q);

  print_model_line(cfg);
  print_kv("t", go.t);
  print_kv("q", go.q);
  print_kv("pressure", pt.value);
  std::printf("\n");
  print_kv("entropy", state.entropy);
  print_kv("lyapunov", state.lyapunov);
  print_kv("f_exponent", state.f_exponent);
  print_kv("dimension", state.dimension);
  print_kv("variational_residual", variational);
  std::printf("\n");

  if (!go.out.empty()) {
    std::ostringstream csv;
    write_gibbs_csv(csv, cfg.system, cfg.family, state);
    write_with_meta(go.out, csv.str(),
                    gibbs_meta_json(cfg.name, cfg.system, cfg.family, go.t,
                                    go.q, state, variational));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
struct DiagnosticsOptions {
  ModelOptions model;
  std::size_t grid = 101;
  double tol_tail = 1e-8;
};

int run_diagnostics(const DiagnosticsOptions& dg) {
  ModelConfig cfg = resolve_model(dg.model);
  print_model_line(cfg);
  bool all_ok = true;
  auto verdict = [&](const char* name, bool ok, const std::string& detail) {
    std::printf("%-22s %s%s%s\n", name, ok ? "ok" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    all_ok = all_ok && ok;
  };

  // Structure: admissible-word connectivity of the stored alphabet.
  const auto irr = check_finite_irreducibility(cfg.system);
  std::string irr_detail;
  if (!irr.irreducible && irr.failing_pair) {
    irr_detail = "symbols " + std::to_string(irr.failing_pair->first) +
                 " -> " + std::to_string(irr.failing_pair->second) +
                 " are not joinable";
  } else if (!irr.note.empty()) {
    irr_detail = irr.note;
  }
  verdict("irreducible", irr.irreducible, irr_detail);

  // Regularity: convergence abscissa and zero of the one-parameter pressure.
  const auto reg = regularity_report(cfg.system);
  std::printf("%-22s theta=%s h=%s regular=%d cofinitely_regular=%d\n",
              "regularity", format_g17(reg.theta).c_str(),
              format_g17(reg.h).c_str(), reg.regular ? 1 : 0,
              reg.cofinitely_regular ? 1 : 0);

  // Attainable exponents.
  const ExponentRange range = exponent_range(cfg.system, cfg.family);
  print_range_line(range);

  // Truncation trust checks (infinite alphabets only).
  const std::vector<std::pair<double, double>> probes = {
      {range.h, 0.0}, {range.h, -1.0}, {range.h + 0.25, -0.5}};
  const auto trunc = truncation_report(cfg.system, cfg.family, probes,
                                       dg.tol_tail);
  if (trunc.applicable) {
    verdict("tail_consistency", trunc.consistent,
            "gap=" + format_g17(trunc.worst_gap) +
                " allowed=" + format_g17(trunc.worst_allowance));
    verdict("tail_accuracy", trunc.accurate,
            "tail_error=" + format_g17(trunc.max_tail_error) +
                " tol=" + format_g17(dg.tol_tail));
  }

  // Divergence-boundary behaviour (infinite alphabets with a curved
  // boundary): pressure and slope must grow toward the boundary.
  const auto blow = boundary_blowup_check(
      cfg.system, cfg.family, range.h + 0.5 * std::max(1.0, range.h));
  if (blow.applicable) {
    verdict("boundary_blowup", blow.value_increasing && blow.slope_increasing,
            "probes=" + std::to_string(blow.probes.size()));
  }

  if (range.degenerate) {
    std::printf("%-22s carried by a single exponent; spectrum checks skipped\n",
                "spectrum");
    return all_ok ? kExitOk : kExitDiagnostics;
  }

  // Spectrum solve and shape.
  GridSpec grid;
  grid.count = dg.grid;
  const SpectrumCurve curve = sample_spectrum(cfg.system, cfg.family, range, grid);
  verdict("spectrum_solved", curve.n_failed == 0,
          std::to_string(curve.points.size() - curve.n_failed) + "/" +
              std::to_string(curve.points.size()) + " points");
  const ShapeReport shape = shape_diagnostics(curve);
  verdict("shape", shape.ok,
          "peak_xi=" + format_g17(shape.peak_xi) +
              " peak_t=" + format_g17(shape.peak_t) +
              " d2=" + format_g17(shape.d2_at_peak));
  if (shape.inflection_applicable)
    verdict("inflection", shape.inflection_right, "");

  // The spectrum must not move when the potential family is shifted by a
  // constant (the exponent axis is affine-equivariant; t is not).
  const double xi_a = 0.75 * range.xi_min + 0.25 * range.xi_zero;
  const double xi_b = range.xi_zero;
  const double span = std::isfinite(range.xi_max) ? range.xi_max : curve.points.back().xi;
  const double xi_c = 0.5 * (range.xi_zero + span);
  try {
    const double worst = translation_invariance_check(cfg.system, cfg.family,
                                                      0.5, {xi_a, xi_b, xi_c});
    verdict("translation", worst <= 1e-8, "max_shift=" + format_g17(worst));
  } catch (const SolverError& e) {
    verdict("translation", false, e.what());
  }

  return all_ok ? kExitOk : kExitDiagnostics;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "exponent spectra of weighted averages for conformal iterated "
      "function systems"};
  app.require_subcommand(1);

  app.add_subcommand("list-builtins", "list the built-in model catalog");

  SpectrumOptions so;
  auto* spectrum = app.add_subcommand(
      "spectrum", "solve the full exponent-to-dimension curve");
  add_model_options(spectrum, so.model);
  spectrum->add_option("--grid", so.grid.count, "number of exponent samples")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  spectrum->add_option("--xi-lo", so.xi_lo, "lower end of the exponent window");
  spectrum->add_option("--xi-hi", so.xi_hi, "upper end of the exponent window");
  spectrum->add_option("--xi-cap", so.grid.xi_cap,
                       "window cap when the exponent range is unbounded");
  spectrum->add_option("--margin", so.grid.margin,
                       "relative margin kept from open range endpoints");
  spectrum->add_option("--tol-root", so.tol_root,
                       "tolerance on the pressure-equation residual");
  spectrum->add_option("--tol-grad", so.tol_grad,
                       "tolerance on the exponent-match residual");
  spectrum->add_option("--out", so.out, "write CSV here (plus .meta.json)");

  PressureOptions po;
  auto* surface = app.add_subcommand(
      "pressure-surface", "evaluate the two-parameter pressure on a grid");
  add_model_options(surface, po.model);
  surface->add_option("--t-range", po.t_axis, "t axis: 'value' or 'lo:hi:count'")
      ->required();
  surface->add_option("--q-range", po.q_axis, "q axis: 'value' or 'lo:hi:count'")
      ->required();
  surface->add_option("--out", po.out, "write CSV here (plus .meta.json)");

  GibbsOptions go;
  auto* gibbs = app.add_subcommand(
      "gibbs", "equilibrium weights and characteristics at one (t, q)");
  add_model_options(gibbs, go.model);
  gibbs->add_option("--t", go.t, "first pressure parameter")->required();
  gibbs->add_option("--q", go.q, "second pressure parameter")->required();
  gibbs->add_option("--out", go.out, "write CSV here (plus .meta.json)");

  DiagnosticsOptions dg;
  auto* diag = app.add_subcommand(
      "diagnostics", "run the structural and numerical trust battery");
  add_model_options(diag, dg.model);
  diag->add_option("--grid", dg.grid, "exponent samples for the shape checks")
      ->check(CLI::Range(std::size_t{5}, std::size_t{100000}));
  diag->add_option("--tol-tail", dg.tol_tail,
                   "acceptable truncation error for infinite alphabets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (app.got_subcommand("list-builtins")) return run_list_builtins();
    if (app.got_subcommand("spectrum")) return run_spectrum(so);
    if (app.got_subcommand("pressure-surface")) return run_pressure_surface(po);
    if (app.got_subcommand("gibbs")) return run_gibbs(go);
    if (app.got_subcommand("diagnostics")) return run_diagnostics(dg);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return kExitInvalid;  // unreachable: a subcommand is required
}
