// INI model description loader.  A config file describes one system and one
// potential family:
//
//   [system]
//   kind = full_shift            ; full_shift | markov | luroth | builtin
//   ratio_1 = 0.5                ; per-symbol contraction ratios (1-based)
//   ratio_2 = 0.25
//   interval_1 = 0.5 1.0         ; optional images "left right" (all or none)
//   incidence_1 = 1 1            ; markov: 0/1 rows, one per symbol
//   partition = 1 0.5 0.25       ; luroth: decreasing partition of [0, 1]
//   builtin = dyadic_luroth        ; builtin: catalog entry by name
//   truncation = 200             ; builtin: override stored alphabet size
//   infinite = true              ; stored symbols truncate an infinite alphabet
//
//   [tail]                       ; required when infinite = true
//   kind = geometric             ; geometric | power_law
//   c_lo = 1.0
//   c_hi = 1.0                   ; default: c_lo
//   alpha = 0.693147...          ; geometric decay rate
//   p = 2.0                      ; power-law exponent
//   exact = true                 ; ratios follow c_lo * exp(-alpha n) exactly
//
//   [family]
//   kind = lyapunov              ; lyapunov | values
//   value_1 = 1.0                ; explicit per-symbol weights
//   bounded = true
//   lower_bound = 1.0
//   comparability = 1.0 0.0 0.0  ; "a b g": a*f_lyap + g <= f <= a*f_lyap + b
//
// Malformed input throws ValidationError with the offending key.
#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "builtin.hpp"
#include "core.hpp"
#include "system.hpp"

namespace mfspec {

struct ModelConfig {
  std::string name;
  SystemSpec system;
  PotentialFamily family;
};

namespace detail {

inline std::vector<double> parse_doubles(const std::string& text,
                                         const std::string& key) {
  std::istringstream in(text);
  std::vector<double> out;
  double x;
  while (in >> x) out.push_back(x);
  std::string rest;
  if (!(in >> rest).eof() || out.empty())
    throw ValidationError("key '" + key + "' is not a list of numbers: '" +
                          text + "'");
  return out;
}

inline double get_double(const boost::property_tree::ptree& pt,
                         const std::string& key) {
  auto opt = pt.get_optional<double>(key);
  if (!opt) throw ValidationError("missing or malformed key '" + key + "'");
  return *opt;
}

// Reads key_1 .. key_n (contiguous, 1-based); returns empty if key_1 absent.
inline std::vector<std::string> numbered_values(
    const boost::property_tree::ptree& pt, const std::string& section,
    const std::string& stem) {
  std::vector<std::string> out;
  for (std::size_t k = 1;; ++k) {
    auto opt = pt.get_optional<std::string>(section + "." + stem + "_" +
                                            std::to_string(k));
    if (!opt) break;
    out.push_back(*opt);
  }
  return out;
}

inline TailModel parse_tail(const boost::property_tree::ptree& pt) {
  TailModel tail;
  const std::string kind = pt.get<std::string>("tail.kind", "");
  if (kind == "geometric") {
    tail.kind = TailKind::geometric;
    tail.alpha = get_double(pt, "tail.alpha");
  } else if (kind == "power_law") {
    tail.kind = TailKind::power_law;
    tail.p = get_double(pt, "tail.p");
  } else {
    throw ValidationError("tail.kind must be 'geometric' or 'power_law', got '" +
                          kind + "'");
  }
  tail.c_lo = get_double(pt, "tail.c_lo");
  tail.c_hi = pt.get<double>("tail.c_hi", tail.c_lo);
  tail.exact = pt.get<bool>("tail.exact", false);
  return tail;
}

}  // namespace detail

inline ModelConfig parse_model_config(const boost::property_tree::ptree& pt,
                                      const std::string& default_name) {
  ModelConfig cfg;
  cfg.name = pt.get<std::string>("system.name", default_name);
  const std::string kind = pt.get<std::string>("system.kind", "full_shift");
  const bool infinite = pt.get<bool>("system.infinite", false);

  if (kind == "builtin") {
    const std::string which = pt.get<std::string>("system.builtin", "");
    if (which.empty())
      throw ValidationError("system.kind = builtin requires system.builtin");
    std::optional<std::size_t> trunc;
    if (auto n = pt.get_optional<std::size_t>("system.truncation")) trunc = *n;
    BuiltinSystem b = make_builtin(which, trunc);
    cfg.name = pt.get<std::string>("system.name", b.name);
    cfg.system = std::move(b.system);
    cfg.family = std::move(b.family);
    // [family] may still override the builtin default below.
  } else if (kind == "luroth") {
    const auto part = detail::parse_doubles(
        pt.get<std::string>("system.partition", ""), "system.partition");
    TailModel tail;
    if (infinite) tail = detail::parse_tail(pt);
    cfg.system = luroth(part, tail);
  } else if (kind == "full_shift" || kind == "markov") {
    const auto ratios = detail::numbered_values(pt, "system", "ratio");
    if (ratios.empty())
      throw ValidationError("system.ratio_1 .. ratio_n are required");
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      const auto vals =
          detail::parse_doubles(ratios[k], "system.ratio_" + std::to_string(k + 1));
      if (vals.size() != 1)
        throw ValidationError("system.ratio_" + std::to_string(k + 1) +
                              " must be a single number");
      cfg.system.ratios.push_back(vals[0]);
    }
    const auto intervals = detail::numbered_values(pt, "system", "interval");
    if (!intervals.empty()) {
      if (intervals.size() != ratios.size())
        throw ValidationError("interval_k rows must cover every symbol");
      for (std::size_t k = 0; k < intervals.size(); ++k) {
        const auto v = detail::parse_doubles(
            intervals[k], "system.interval_" + std::to_string(k + 1));
        if (v.size() != 2)
          throw ValidationError("system.interval_" + std::to_string(k + 1) +
                                " must be 'left right'");
        cfg.system.intervals.push_back({v[0], v[1]});
      }
    }
    if (kind == "markov") {
      const auto rows = detail::numbered_values(pt, "system", "incidence");
      if (rows.size() != ratios.size())
        throw ValidationError("incidence_k rows must cover every symbol");
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto v = detail::parse_doubles(
            rows[k], "system.incidence_" + std::to_string(k + 1));
        std::vector<std::uint8_t> row;
        for (double x : v) {
          if (x != 0.0 && x != 1.0)
            throw ValidationError("system.incidence_" + std::to_string(k + 1) +
                                  " must contain only 0 and 1");
          row.push_back(x != 0.0 ? 1 : 0);
        }
        cfg.system.incidence.push_back(std::move(row));
      }
    }
    cfg.system.infinite = infinite;
    if (infinite) cfg.system.tail = detail::parse_tail(pt);
  } else {
    throw ValidationError("system.kind must be full_shift, markov, luroth or "
                          "builtin, got '" + kind + "'");
  }

  // Potential family (defaults to the ratio-linked one).
  const std::string fkind = pt.get<std::string>("family.kind",
                                                kind == "builtin" ? "" : "lyapunov");
  if (fkind == "lyapunov") {
    cfg.family = lyapunov_family(cfg.system);
  } else if (fkind == "values") {
    const auto rows = detail::numbered_values(pt, "family", "value");
    if (rows.size() != cfg.system.size())
      throw ValidationError("family.value_k rows must cover every symbol");
    cfg.family = PotentialFamily{};
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto v = detail::parse_doubles(
          rows[k], "family.value_" + std::to_string(k + 1));
      if (v.size() != 1)
        throw ValidationError("family.value_" + std::to_string(k + 1) +
                              " must be a single number");
      cfg.family.values.push_back(v[0]);
    }
    cfg.family.bounded = pt.get<bool>("family.bounded", !cfg.system.infinite);
    if (auto lb = pt.get_optional<double>("family.lower_bound"))
      cfg.family.lower_bound = *lb;
    if (auto comp = pt.get_optional<std::string>("family.comparability")) {
      const auto v = detail::parse_doubles(*comp, "family.comparability");
      if (v.size() != 3)
        throw ValidationError("family.comparability must be 'a b g'");
      cfg.family.comparability = {{v[0], v[1], v[2]}};
    }
  } else if (!fkind.empty()) {
    throw ValidationError("family.kind must be 'lyapunov' or 'values', got '" +
                          fkind + "'");
  }

  // Surface structural problems immediately with the config vocabulary.
  auto violations = validate_system(cfg.system);
  const auto fam_violations = validate_family(cfg.system, cfg.family);
  violations.insert(violations.end(), fam_violations.begin(),
                    fam_violations.end());
  if (!violations.empty()) {
    std::string msg = "config describes an invalid model:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ValidationError(msg);
  }
  return cfg;
}

inline ModelConfig load_model_config(const std::string& path) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(path, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string("cannot read config: ") + e.what());
  }
  std::string stem = path;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos)
    stem = stem.substr(slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos)
    stem = stem.substr(0, dot);
  return parse_model_config(pt, stem);
}

}  // namespace mfspec
