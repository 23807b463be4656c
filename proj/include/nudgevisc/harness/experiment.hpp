#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nudgevisc/diagnostics/bounds.hpp"
#include "nudgevisc/diagnostics/force_stats.hpp"
#include "nudgevisc/diagnostics/record.hpp"
#include "nudgevisc/estimator/estimator.hpp"
#include "nudgevisc/flow/checkpoint.hpp"
#include "nudgevisc/flow/integrator.hpp"
#include "nudgevisc/harness/config.hpp"
#include "nudgevisc/harness/io.hpp"
#include "nudgevisc/harness/verify.hpp"
#include "nudgevisc/spectral/random.hpp"

namespace nudgevisc {

/// Environment variable that replaces run.output_dir when set and non-empty.
inline constexpr const char* kOutputDirEnv = "NUDGEVISC_OUTPUT_DIR";

/// Applies environment overrides to a loaded configuration.
inline ExperimentConfig apply_environment(ExperimentConfig cfg) {
  if (const char* d = std::getenv(kOutputDirEnv); d && *d) cfg.run.output_dir = d;
  return cfg;
}

/// Least-squares slope of log|Aw|^2 against t over the records whose value
/// is still above floor_ratio times the first one.
struct DecayFit {
  double rate = kUnset;
  double orders = kUnset;  // log10 of first over last fitted value
  std::size_t points = 0;
  bool monotone = false;   // every fitted record is below its predecessor
};

inline DecayFit fit_error_decay(std::span<const DiagnosticsRecord> recs, double floor_ratio = 1e-20) {
  DecayFit f;
  if (recs.empty()) return f;
  const double first = recs.front().norms[2][2] * recs.front().norms[2][2];
  if (!(first > 0.0)) return f;
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : recs) {
    const double v = r.norms[2][2] * r.norms[2][2];
    if (!(v > first * floor_ratio)) break;
    pts.emplace_back(r.t, std::log(v));
  }
  f.points = pts.size();
  if (pts.size() < 2) return f;
  f.monotone = true;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i].second < pts[i - 1].second)) f.monotone = false;
  double st = 0, sy = 0;
  for (auto& [t, y] : pts) st += t, sy += y;
  const double n = static_cast<double>(pts.size());
  const double mt = st / n, my = sy / n;
  double num = 0, den = 0;
  for (auto& [t, y] : pts) num += (t - mt) * (y - my), den += (t - mt) * (t - mt);
  f.rate = den > 0 ? num / den : kUnset;
  f.orders = (pts.front().second - pts.back().second) / std::log(10.0);
  return f;
}

struct SpinUpInfo {
  double t_spin = 0.0;
  double h1_initial = 0.0;
  double h1 = 0.0;
  double radius = 0.0;
  bool inside_ball = false;
};

struct RunSummary {
  RunMode mode = RunMode::twin;
  std::string status = "ok";  // ok | blow_up
  std::string message;
  std::vector<std::pair<std::string, std::string>> config;
  SpinUpInfo spin_up;
  std::optional<EstimationTrace> trace;
  std::optional<double> nu_abs_error;  // |nu_M - nu|, twin mode
  std::optional<double> nu_rel_error;
  std::optional<DecayFit> decay;       // sync_only mode
  std::optional<ForceStats> stats;
  std::optional<ConditionReport> conditions;
  std::optional<BoundReport> bounds;
  std::optional<VerifyReport> verify;
  std::vector<DiagnosticsRecord> records;
  /// artifact name to file name relative to output_dir
  std::vector<std::pair<std::string, std::string>> artifacts;
  std::string output_dir;
  double wall_seconds = 0.0;

  std::string artifact_path(const std::string& name) const {
    for (const auto& [k, v] : artifacts)
      if (k == name) return (std::filesystem::path(output_dir) / v).string();
    return {};
  }
};

/// Summary as JSON.  Output directory and wall time are left out so that
/// identical runs into different directories produce identical files.
inline json summary_json(const RunSummary& s) {
  using detail::jnum;
  json j;
  j["schema_version"] = kJsonSchemaVersion;
  j["mode"] = to_string(s.mode);
  j["status"] = s.status;
  j["message"] = s.message;
  json cfg = json::object();
  for (const auto& [k, v] : s.config)
    if (k != "run.output_dir") cfg[k] = v;
  j["config"] = cfg;
  if (s.mode != RunMode::verify) {
    j["spin_up"] = {{"t_spin", jnum(s.spin_up.t_spin)},
                    {"h1_initial", jnum(s.spin_up.h1_initial)},
                    {"h1", jnum(s.spin_up.h1)},
                    {"radius", jnum(s.spin_up.radius)},
                    {"inside_ball", s.spin_up.inside_ball}};
  }
  if (s.trace) {
    const auto& tr = *s.trace;
    json beta = json::array();
    for (double b : tr.beta) beta.push_back(jnum(b));
    j["estimation"] = {{"nu_true", tr.nu_true ? jnum(*tr.nu_true) : json(nullptr)},
                       {"nu0", jnum(tr.nu0)},
                       {"final_nu", jnum(tr.final_nu)},
                       {"abs_error", s.nu_abs_error ? jnum(*s.nu_abs_error) : json(nullptr)},
                       {"rel_error", s.nu_rel_error ? jnum(*s.nu_rel_error) : json(nullptr)},
                       {"accepted_updates", tr.accepted},
                       {"skipped_updates", static_cast<int>(tr.updates.size()) - tr.accepted},
                       {"beta", beta}};
  }
  if (s.decay) {
    j["synchronization"] = {{"rate", jnum(s.decay->rate)},
                            {"orders", jnum(s.decay->orders)},
                            {"points", s.decay->points},
                            {"monotone", s.decay->monotone}};
  }
  if (s.stats) j["force_stats"] = force_stats_json(*s.stats);
  if (s.conditions) j["conditions"] = condition_report_json(*s.conditions);
  if (s.bounds) j["bounds"] = bound_report_json(*s.bounds);
  if (s.verify) {
    json checks = json::array();
    for (const auto& c : s.verify->checks)
      checks.push_back({{"suite", c.suite},
                        {"name", c.name},
                        {"value", jnum(c.value)},
                        {"tolerance", jnum(c.tolerance)},
                        {"passed", c.passed}});
    j["verify"] = {{"passed", s.verify->passed()},
                   {"failures", s.verify->failures()},
                   {"checks", checks}};
  }
  json art = json::object();
  for (const auto& [k, v] : s.artifacts) art[k] = v;
  j["artifacts"] = art;
  return j;
}

inline void write_summary(const RunSummary& s, const std::string& path) {
  write_json(summary_json(s), path);
}

/// Force statistics and the advisory condition report of a configuration,
/// without integrating anything.
inline std::pair<ForceStats, ConditionReport> config_stats(const ExperimentConfig& cfg) {
  const SystemParams p = resolved_system(cfg);
  const SpectralField g = make_forcing(p.forcing, grid_create(cfg.n));
  ForceStats st = force_stats(g, p);
  ConditionReport cr = verify_mu_conditions(p, st);
  return {std::move(st), std::move(cr)};
}

/// Random divergence-free initial field with H1 norm h1_fraction * R1
/// (h1_fraction itself when there is no forcing).
inline SpectralField initial_field(const ExperimentConfig& cfg, const SystemParams& p) {
  const GridSpec g = grid_create(cfg.n);
  const int kmax = std::min(cfg.init.k_max, g.dealias_cutoff);
  SpectralField u = random_field(g, cfg.run.seed, kmax);
  const double radius = std::sqrt(2.0) * norm_hs(make_forcing(p.forcing, g), 0.0) / p.nu;
  const double target = cfg.init.h1_fraction * (radius > 0.0 ? radius : 1.0);
  const double h1 = norm_hs(u, 1.0);
  if (h1 > 0.0) u *= target / h1;
  return u;
}

namespace detail {

inline void write_run_artifacts(RunSummary& s, const ExperimentConfig& cfg, const SystemParams& p,
                                const PairState* last) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(s.output_dir, ec);
  if (ec) throw io_error(s.output_dir, "cannot create output directory: " + ec.message());
  auto path = [&](const char* f) { return (fs::path(s.output_dir) / f).string(); };
  s.artifacts.clear();
  if (s.mode != RunMode::verify) {
    write_timeseries(s.records, path("timeseries.csv"));
    s.artifacts.emplace_back("timeseries", "timeseries.csv");
    emit_plot_data(s.trace ? &*s.trace : nullptr, s.records, path("plot_data.csv"));
    s.artifacts.emplace_back("plot_data", "plot_data.csv");
  }
  if (s.trace) {
    write_json(trace_json(*s.trace), path("trace.json"));
    s.artifacts.emplace_back("trace", "trace.json");
  }
  if (s.stats || s.conditions || s.bounds) {
    json c = json::object();
    c["schema_version"] = kJsonSchemaVersion;
    c["force_stats"] = s.stats ? force_stats_json(*s.stats) : json(nullptr);
    c["conditions"] = s.conditions ? condition_report_json(*s.conditions) : json(nullptr);
    c["bounds"] = s.bounds ? bound_report_json(*s.bounds) : json(nullptr);
    write_json(c, path("conditions.json"));
    s.artifacts.emplace_back("conditions", "conditions.json");
  }
  if (last) {
    SystemParams cp = p;
    if (s.trace) cp.nu_tilde = s.trace->final_nu;
    save_checkpoint(path("checkpoint.txt"), cp, *last);
    s.artifacts.emplace_back("checkpoint", "checkpoint.txt");
  }
  s.artifacts.emplace_back("summary", "summary.json");
  write_summary(s, path("summary.json"));
  (void)cfg;
}

}  // namespace detail

/// Runs one experiment and writes its artifacts into cfg.run.output_dir.
///   twin:      spin-up, then the estimation loop from estimator.nu0
///   sync_only: spin-up, then the pair at the fixed system.nu_tilde
///   verify:    the invariant self-test suites
/// A blow-up writes the artifacts gathered so far and is rethrown.
inline RunSummary run_experiment(const ExperimentConfig& cfg) {
  const auto clock0 = std::chrono::steady_clock::now();
  RunSummary s;
  s.mode = cfg.run.mode;
  s.config = config_entries(cfg);
  s.output_dir = cfg.run.output_dir;
  auto finish = [&] {
    s.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
  };

  if (cfg.run.mode == RunMode::verify) {
    s.verify = run_verify_suites(cfg.verify, cfg.run.seed);
    finish();
    detail::write_run_artifacts(s, cfg, cfg.system, nullptr);
    return s;
  }

  const SystemParams p = resolved_system(cfg);
  const GridSpec grid = grid_create(cfg.n);
  const SpectralField g = make_forcing(p.forcing, grid);
  if (!g.is_zero()) {
    s.stats = force_stats(g, p);
    s.conditions = verify_mu_conditions(p, *s.stats);
  }

  RecordCollector col(g, cfg.run.record_stride);
  std::optional<PairState> last;
  try {
    SpectralField u = initial_field(cfg, p);
    s.spin_up.h1_initial = norm_hs(u, 1.0);
    s.spin_up.radius = std::sqrt(2.0) * norm_hs(g, 0.0) / p.nu;
    s.spin_up.t_spin = cfg.run.t_spin;
    if (cfg.run.t_spin > 0.0) {
      SpinUpResult su = spin_up(u, p, cfg.run.t_spin);
      u = std::move(su.u);
    }
    s.spin_up.h1 = norm_hs(u, 1.0);
    s.spin_up.inside_ball = s.spin_up.radius > 0.0 && s.spin_up.h1 <= s.spin_up.radius;

    PairState pair0{0.0, u, SpectralField(grid)};
    if (cfg.init.observer == ObserverInit::zero) pair0.w = -1.0 * u;

    if (cfg.run.mode == RunMode::twin) {
      EstimationOptions opt;
      opt.t_final = cfg.run.t_final;
      opt.nu_true = p.nu;
      opt.sink = &col;
      opt.on_segment = [&](int seg) { col.set_segment(seg); };
      EstimationTrace tr = run_estimation(pair0, p, cfg.estimator, opt);
      s.nu_abs_error = std::abs(tr.final_nu - p.nu);
      s.nu_rel_error = *s.nu_abs_error / p.nu;
      last = tr.final_state;
      s.trace = std::move(tr);
    } else {
      Integrator integ(grid, p);
      col.record(pair0, p);
      last = integ.integrate(pair0, cfg.run.t_final, &col);
      if (static_cast<long>(std::llround(cfg.run.t_final / p.dt)) % cfg.run.record_stride != 0)
        col.record(*last, p);
    }
  } catch (const blow_up& e) {
    s.status = "blow_up";
    s.message = e.what();
    s.records = col.records();
    fill_finite_differences(s.records);
    finish();
    detail::write_run_artifacts(s, cfg, p, nullptr);
    throw;
  }

  s.records = col.records();
  fill_finite_differences(s.records);
  SystemParams pb = p;
  if (s.trace) pb.nu_tilde = s.trace->final_nu;
  s.bounds = bound_checks(s.records, g, pb, cfg.verify.tol_bounds);
  if (cfg.run.mode == RunMode::sync_only) s.decay = fit_error_decay(s.records);
  finish();
  detail::write_run_artifacts(s, cfg, p, last ? &*last : nullptr);
  return s;
}

}  // namespace nudgevisc
