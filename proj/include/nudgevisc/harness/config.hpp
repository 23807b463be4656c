#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nudgevisc/errors.hpp"
#include "nudgevisc/estimator/estimator.hpp"
#include "nudgevisc/flow/forcing.hpp"
#include "nudgevisc/flow/params.hpp"
#include "nudgevisc/format.hpp"

namespace nudgevisc {

enum class RunMode { twin, sync_only, verify };
enum class ObserverInit { zero, reference };

inline const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::twin: return "twin";
    case RunMode::sync_only: return "sync_only";
    case RunMode::verify: return "verify";
  }
  return "?";
}

struct RunSettings {
  RunMode mode = RunMode::twin;
  double t_spin = 50.0;
  double t_final = 8.0;
  long record_stride = 10;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
};

/// Initial reference state: a random solenoidal field on 1 <= |k| <= k_max
/// scaled to H1 norm h1_fraction * R1, then spun up.  The observer starts at
/// zero or on the reference.
struct InitSettings {
  int k_max = 8;
  double h1_fraction = 0.5;
  ObserverInit observer = ObserverInit::zero;
};

/// Self-test grid, sample count and tolerances.
struct VerifySettings {
  int n = 32;
  int samples = 20;
  double tol_orthogonality = 1e-10;
  double tol_divergence = 1e-12;
  double tol_roundtrip = 1e-12;
  double tol_plancherel = 1e-10;
  double tol_bounds = 1e-8;
};

struct ExperimentConfig {
  int n = 128;
  SystemParams system;
  /// Target Grashof number; used to set the forcing amplitude when
  /// forcing.amplitude is not given.
  double grashof = 20.0;
  bool amplitude_given = false;
  EstimatorConfig estimator;
  RunSettings run;
  InitSettings init;
  VerifySettings verify;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// One recognised key: parser and printer.
struct KeySpec {
  std::string key;
  std::function<std::optional<std::string>(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
KeySpec real_key(std::string key, T ExperimentConfig::*outer, double T::*field) {
  return {key,
          [=](ExperimentConfig& c, const std::string& v) -> std::optional<std::string> {
            auto d = parse_double(v);
            if (!d) return "expected a real number, got '" + v + "'";
            (c.*outer).*field = *d;
            return std::nullopt;
          },
          [=](const ExperimentConfig& c) { return format_double((c.*outer).*field); }};
}

template <class T, class I>
KeySpec int_key(std::string key, T ExperimentConfig::*outer, I T::*field) {
  return {key,
          [=](ExperimentConfig& c, const std::string& v) -> std::optional<std::string> {
            auto d = parse_int(v);
            if (!d) return "expected an integer, got '" + v + "'";
            (c.*outer).*field = static_cast<I>(*d);
            return std::nullopt;
          },
          [=](const ExperimentConfig& c) { return std::to_string((c.*outer).*field); }};
}

inline std::vector<KeySpec> key_table() {
  using C = ExperimentConfig;
  std::vector<KeySpec> t;
  t.push_back({"grid.n",
               [](C& c, const std::string& v) -> std::optional<std::string> {
                 auto d = parse_int(v);
                 if (!d) return "expected an integer, got '" + v + "'";
                 c.n = static_cast<int>(*d);
                 return std::nullopt;
               },
               [](const C& c) { return std::to_string(c.n); }});
  t.push_back(real_key("system.nu", &C::system, &SystemParams::nu));
  t.push_back(real_key("system.nu_tilde", &C::system, &SystemParams::nu_tilde));
  t.push_back(real_key("system.mu", &C::system, &SystemParams::mu));
  t.push_back(int_key("system.n_obs", &C::system, &SystemParams::n_obs));
  t.push_back(real_key("system.dt", &C::system, &SystemParams::dt));

  t.push_back({"forcing.kind",
               [](C& c, const std::string& v) -> std::optional<std::string> {
                 if (v == "single_mode") c.system.forcing.kind = ForcingKind::single_mode;
                 else if (v == "band") c.system.forcing.kind = ForcingKind::band;
                 else return "expected single_mode or band, got '" + v + "'";
                 return std::nullopt;
               },
               [](const C& c) {
                 return std::string(c.system.forcing.kind == ForcingKind::band ? "band"
                                                                               : "single_mode");
               }});
  t.push_back({"forcing.amplitude",
               [](C& c, const std::string& v) -> std::optional<std::string> {
                 auto d = parse_double(v);
                 if (!d) return "expected a real number, got '" + v + "'";
                 c.system.forcing.amplitude = *d;
                 c.amplitude_given = true;
                 return std::nullopt;
               },
               [](const C& c) { return format_double(c.system.forcing.amplitude); }});
  t.push_back({"forcing.grashof",
               [](C& c, const std::string& v) -> std::optional<std::string> {
                 auto d = parse_double(v);
                 if (!d) return "expected a real number, got '" + v + "'";
                 c.grashof = *d;
                 return std::nullopt;
               },
               [](const C& c) { return format_double(c.grashof); }});
  auto forcing_int = [](std::string key, int ForcingSpec::*f) {
    return KeySpec{key,
                   [=](C& c, const std::string& v) -> std::optional<std::string> {
                     auto d = parse_int(v);
                     if (!d) return "expected an integer, got '" + v + "'";
                     c.system.forcing.*f = static_cast<int>(*d);
                     return std::nullopt;
                   },
                   [=](const C& c) { return std::to_string(c.system.forcing.*f); }};
  };
  auto forcing_real = [](std::string key, double ForcingSpec::*f) {
    return KeySpec{key,
                   [=](C& c, const std::string& v) -> std::optional<std::string> {
                     auto d = parse_double(v);
                     if (!d) return "expected a real number, got '" + v + "'";
                     c.system.forcing.*f = *d;
                     return std::nullopt;
                   },
                   [=](const C& c) { return format_double(c.system.forcing.*f); }};
  };
  t.push_back(forcing_int("forcing.k1", &ForcingSpec::k1));
  t.push_back(forcing_int("forcing.k2", &ForcingSpec::k2));
  t.push_back(forcing_real("forcing.band_min", &ForcingSpec::band_min));
  t.push_back(forcing_real("forcing.band_max", &ForcingSpec::band_max));
  t.push_back(forcing_real("forcing.phase", &ForcingSpec::phase));

  t.push_back(real_key("estimator.nu0", &C::estimator, &EstimatorConfig::nu0));
  t.push_back(real_key("estimator.epsilon", &C::estimator, &EstimatorConfig::epsilon));
  t.push_back(real_key("estimator.min_wait", &C::estimator, &EstimatorConfig::min_wait));
  t.push_back(real_key("estimator.plateau_tol", &C::estimator, &EstimatorConfig::plateau_tol));
  t.push_back(real_key("estimator.plateau_window", &C::estimator, &EstimatorConfig::plateau_window));
  t.push_back(int_key("estimator.max_updates", &C::estimator, &EstimatorConfig::max_updates));

  t.push_back({"run.mode",
               [](C& c, const std::string& v) -> std::optional<std::string> {
                 if (v == "twin") c.run.mode = RunMode::twin;
                 else if (v == "sync_only") c.run.mode = RunMode::sync_only;
                 else if (v == "verify") c.run.mode = RunMode::verify;
                 else return "expected twin, sync_only or verify, got '" + v + "'";
                 return std::nullopt;
               },
               [](const C& c) { return std::string(to_string(c.run.mode)); }});
  t.push_back(real_key("run.t_spin", &C::run, &RunSettings::t_spin));
  t.push_back(real_key("run.t_final", &C::run, &RunSettings::t_final));
  t.push_back(int_key("run.record_stride", &C::run, &RunSettings::record_stride));
  t.push_back({"run.seed",
               [](C& c, const std::string& v) -> std::optional<std::string> {
                 auto d = parse_int(v);
                 if (!d || *d < 0) return "expected a non-negative integer, got '" + v + "'";
                 c.run.seed = static_cast<std::uint64_t>(*d);
                 return std::nullopt;
               },
               [](const C& c) { return std::to_string(c.run.seed); }});
  t.push_back({"run.output_dir",
               [](C& c, const std::string& v) -> std::optional<std::string> {
                 if (v.empty()) return std::string("output directory must not be empty");
                 c.run.output_dir = v;
                 return std::nullopt;
               },
               [](const C& c) { return c.run.output_dir; }});

  t.push_back(int_key("init.k_max", &C::init, &InitSettings::k_max));
  t.push_back(real_key("init.h1_fraction", &C::init, &InitSettings::h1_fraction));
  t.push_back({"init.observer",
               [](C& c, const std::string& v) -> std::optional<std::string> {
                 if (v == "zero") c.init.observer = ObserverInit::zero;
                 else if (v == "reference") c.init.observer = ObserverInit::reference;
                 else return "expected zero or reference, got '" + v + "'";
                 return std::nullopt;
               },
               [](const C& c) {
                 return std::string(c.init.observer == ObserverInit::zero ? "zero" : "reference");
               }});

  t.push_back(int_key("verify.n", &C::verify, &VerifySettings::n));
  t.push_back(int_key("verify.samples", &C::verify, &VerifySettings::samples));
  t.push_back(real_key("verify.tol_orthogonality", &C::verify, &VerifySettings::tol_orthogonality));
  t.push_back(real_key("verify.tol_divergence", &C::verify, &VerifySettings::tol_divergence));
  t.push_back(real_key("verify.tol_roundtrip", &C::verify, &VerifySettings::tol_roundtrip));
  t.push_back(real_key("verify.tol_plancherel", &C::verify, &VerifySettings::tol_plancherel));
  t.push_back(real_key("verify.tol_bounds", &C::verify, &VerifySettings::tol_bounds));
  return t;
}

}  // namespace detail

/// Every invariant violated by a parsed configuration.
inline std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> out;
  GridSpec g;
  bool grid_ok = true;
  try {
    g = grid_create(c.n);
  } catch (const error& e) {
    out.push_back(std::string("grid.n: ") + e.what());
    grid_ok = false;
  }
  if (grid_ok) {
    for (auto& s : c.system.problems(g)) out.push_back(s);
    if (c.system.nu > 0.0) {
      try {
        ForcingSpec f = c.system.forcing;
        if (!c.amplitude_given) f.amplitude = 1.0;
        make_forcing(f, g);
      } catch (const error& e) {
        out.push_back(std::string("forcing: ") + e.what());
      }
    }
  }
  if (!c.amplitude_given && !(c.grashof >= 0.0)) out.push_back("forcing.grashof must be >= 0");
  for (auto& s : c.estimator.problems(c.system.dt)) out.push_back(s);
  if (!(c.run.t_spin >= 0.0)) out.push_back("run.t_spin must be >= 0");
  if (!(c.run.t_final > 0.0)) out.push_back("run.t_final must be > 0");
  if (c.run.record_stride < 1) out.push_back("run.record_stride must be >= 1");
  if (c.init.k_max < 1) out.push_back("init.k_max must be >= 1");
  if (!(c.init.h1_fraction > 0.0)) out.push_back("init.h1_fraction must be > 0");
  if (c.verify.n < 8 || c.verify.n % 2 != 0) out.push_back("verify.n must be even and >= 8");
  if (c.verify.samples < 1) out.push_back("verify.samples must be >= 1");
  for (double tol : {c.verify.tol_orthogonality, c.verify.tol_divergence, c.verify.tol_roundtrip,
                     c.verify.tol_plancherel, c.verify.tol_bounds})
    if (!(tol > 0.0)) {
      out.push_back("verify tolerances must be > 0");
      break;
    }
  return out;
}

/// Parses `key = value` lines ('#' starts a comment).  Unknown or repeated
/// keys are errors.  Throws config_error listing every problem found,
/// parse errors with their line numbers.
inline ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig c;
  std::vector<std::string> errors;
  const auto table = detail::key_table();
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (auto it = seen.find(key); it != seen.end()) {
      errors.push_back(where + "duplicate key '" + key + "' (first set on line " +
                       std::to_string(it->second) + ")");
      continue;
    }
    seen[key] = lineno;
    if (key.rfind("constants.", 0) == 0) {
      const std::string name = key.substr(10);
      if (!ConditionConstants::known(name)) {
        errors.push_back(where + "unknown constant '" + name + "'");
        continue;
      }
      auto d = parse_double(value);
      if (!d || !(*d > 0.0)) {
        errors.push_back(where + key + ": expected a positive real number, got '" + value + "'");
        continue;
      }
      c.system.constants.set(name, *d);
      continue;
    }
    bool found = false;
    for (const auto& spec : table) {
      if (spec.key != key) continue;
      found = true;
      if (auto msg = spec.set(c, value)) errors.push_back(where + key + ": " + *msg);
      break;
    }
    if (!found) errors.push_back(where + "unknown key '" + key + "'");
  }
  for (auto& v : validate_config(c)) errors.push_back(v);
  if (!errors.empty()) throw config_error(errors);
  return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error(path, "cannot open configuration");
  return parse_config(is);
}

/// Canonical listing of every key with its effective value, one per line,
/// in a fixed order; constants overrides follow.
inline std::string echo_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& spec : detail::key_table()) out += spec.key + " = " + spec.get(c) + "\n";
  for (const auto& [name, value] : c.system.constants.overrides())
    out += "constants." + name + " = " + format_double(value) + "\n";
  return out;
}

/// Ordered key/value pairs of echo_config, for embedding in reports.
inline std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& spec : detail::key_table()) out.emplace_back(spec.key, spec.get(c));
  for (const auto& [name, value] : c.system.constants.overrides())
    out.emplace_back("constants." + name, format_double(value));
  return out;
}

/// System parameters with the forcing amplitude resolved from the Grashof
/// target when no explicit amplitude was configured.
inline SystemParams resolved_system(const ExperimentConfig& c) {
  SystemParams p = c.system;
  if (!c.amplitude_given)
    p.forcing.amplitude = amplitude_for_grashof(p.forcing, grid_create(c.n), p.nu, c.grashof);
  return p;
}

}  // namespace nudgevisc
