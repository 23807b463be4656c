// Acceptance gate: nine end-to-end criteria, one PASS/FAIL line each.
// Exit status is 0 only when every criterion passes.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../unit/oracles.hpp"
#include "nudgevisc/nudgevisc.hpp"

using namespace nudgevisc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(4) << x;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared state of the long runs, produced once and read by several criteria.
struct Runs {
  fs::path out;
  std::string source_dir;
  std::optional<RunSummary> sync;
  double sync_seconds = 0.0;
  std::optional<RunSummary> twin;
  double twin_seconds = 0.0;
  double balance_ratio = kUnset;
};

ExperimentConfig load_reference(const Runs& r, const std::string& name, const std::string& sub) {
  ExperimentConfig c = load_config(r.source_dir + "/configs/" + name);
  c.run.output_dir = (r.out / sub).string();
  return c;
}

// 1: <B(u,v),v> = 0 and <B(u,u),Au> = 0 on random dealiased fields.
Outcome orthogonality() {
  const auto t0 = std::chrono::steady_clock::now();
  const GridSpec g = grid_create(64);
  double worst1 = 0.0, worst2 = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const SpectralField u = random_field(g, 1000 + 2 * s, g.dealias_cutoff);
    const SpectralField v = random_field(g, 1001 + 2 * s, g.dealias_cutoff);
    const double nu1 = norm_hs(u, 1.0), nv1 = norm_hs(v, 1.0);
    worst1 = std::max(worst1, std::abs(inner_hs(bilinear(u, v), v, 0.0)) / (nu1 * nv1 * nv1));
    worst2 = std::max(worst2, std::abs(inner_hs(bilinear(u, u), stokes_apply(u, 2.0), 0.0)) /
                                  (nu1 * nu1 * norm_hs(u, 2.0)));
  }
  const double secs = seconds_since(t0);
  return {worst1 <= 1e-10 && worst2 <= 1e-10 && secs < 10.0,
          "max |<B(u,v),v>|/(|u||v|^2) = " + num(worst1) + ", max |<B(u,u),Au>|/(|u|^2|Au|) = " +
              num(worst2) + ", " + num(secs) + " s"};
}

// 2: pseudo-spectral B against the direct convolution sum on 8x8.
Outcome convolution_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const GridSpec g = grid_create(8);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SpectralField u = random_field(g, 500 + 2 * s, g.dealias_cutoff);
    const SpectralField v = random_field(g, 501 + 2 * s, g.dealias_cutoff);
    worst = std::max(worst, oracle::relative_max_diff(bilinear(u, v), oracle::convolution_bilinear(u, v)));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 5.0, "max relative difference " + num(worst) + ", " + num(secs) + " s"};
}

// Max |balance identity - centred difference| of E_N over the times t = k * 0.01
// of a fixed-viscosity twin window of `steps` steps of size dt.
double balance_residual(const PairState& s0, SystemParams p, double dt, long steps) {
  p.dt = dt;
  Integrator integ(s0.u.grid(), p);
  RecordCollector col(integ.forcing(), 1);
  col.record(s0, p);
  integ.integrate(s0, s0.t + dt * static_cast<double>(steps), &col);
  const PowerBalance b = power_balance(col.records(), p.mu, p.nu);
  const long every = std::lround(0.01 / dt);
  double worst = 0.0;
  for (std::size_t i = 0; i < b.t.size(); ++i)
    if ((static_cast<long>(i) + 1) % every == 0) worst = std::max(worst, std::abs(b.residual_E[i]));
  return worst;
}

// 3: balance identity against finite differences, second order in dt.
Outcome balance_identity(Runs& r) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig c = load_reference(r, "twin_reference.cfg", "balance");
  c.n = 64;
  c.run.t_spin = 20.0;
  SystemParams p = resolved_system(c);
  const SpectralField u = spin_up(initial_field(c, p), p, c.run.t_spin).u;
  p.nu_tilde = 2.0 * p.nu;
  const PairState s0{0.0, u, -1.0 * u};
  const double coarse = balance_residual(s0, p, 0.01, 500);
  const double fine = balance_residual(s0, p, 0.005, 1000);
  r.balance_ratio = coarse / fine;
  const double secs = seconds_since(t0);
  return {r.balance_ratio >= 3.2 && r.balance_ratio <= 4.8 && secs < 60.0,
          "max residual " + num(coarse) + " (dt) / " + num(fine) + " (dt/2) = " +
              num(r.balance_ratio) + ", " + num(secs) + " s"};
}

// 4: exponential synchronisation with equal viscosities.
Outcome synchronisation(Runs& r) {
  const ExperimentConfig c = load_reference(r, "sync_only.cfg", "sync");
  const auto t0 = std::chrono::steady_clock::now();
  r.sync = run_experiment(c);
  r.sync_seconds = seconds_since(t0);
  const auto& recs = r.sync->records;
  const double mu = c.system.mu;
  // per-window maxima of |Aw|^2 over windows of length 5/mu must decrease
  const double window = 5.0 / mu;
  std::vector<double> peaks;
  for (const auto& rec : recs) {
    const std::size_t k = static_cast<std::size_t>(std::floor(rec.t / window + 1e-9));
    if (peaks.size() <= k) peaks.resize(k + 1, 0.0);
    peaks[k] = std::max(peaks[k], rec.norms[2][2] * rec.norms[2][2]);
  }
  bool monotone = true;
  for (std::size_t k = 1; k < peaks.size(); ++k) monotone = monotone && peaks[k] < peaks[k - 1];
  const double first = recs.front().norms[2][2] * recs.front().norms[2][2];
  double decades = 0.0;
  for (const auto& rec : recs)
    if (rec.t <= 5.0 + 1e-9)
      decades = std::max(decades, std::log10(first / (rec.norms[2][2] * rec.norms[2][2])));
  const DecayFit& f = *r.sync->decay;
  const bool ok = monotone && decades >= 10.0 && f.rate <= -mu / 4.0 && r.sync_seconds < 180.0;
  return {ok, std::string("windowed decay ") + (monotone ? "monotone" : "NOT monotone") + ", " +
                  num(decades) + " decades by t=5, fitted rate " + num(f.rate) + " (limit " +
                  num(-mu / 4.0) + "), " + num(r.sync_seconds) + " s"};
}

// 5: estimator convergence from twice the true viscosity.
Outcome estimator_convergence(Runs& r) {
  ExperimentConfig c = load_reference(r, "twin_reference.cfg", "twin_a");
  c.run.record_stride = 1;
  const auto t0 = std::chrono::steady_clock::now();
  r.twin = run_experiment(c);
  r.twin_seconds = seconds_since(t0);
  const EstimationTrace& tr = *r.twin->trace;
  const auto acc = tr.accepted_updates();
  bool beta_ok = true, positive = true;
  double worst_beta = 0.0;
  for (const auto* u : acc) {
    const bool exact = u->nu_before == *tr.nu_true;
    if (!exact) {
      beta_ok = beta_ok && u->beta < 1.0;
      worst_beta = std::max(worst_beta, u->beta);
    }
    positive = positive && u->nu_after > 0.0;
  }
  const double rel = *r.twin->nu_rel_error;
  const bool doubled = c.estimator.nu0 == 2.0 * c.system.nu;
  const bool ok = acc.size() >= 5 && beta_ok && positive && rel <= 1e-6 && doubled &&
                  r.twin_seconds < 300.0;
  return {ok, std::to_string(acc.size()) + " accepted updates, max beta " + num(worst_beta) +
                  ", final relative error " + num(rel) + (positive ? "" : ", NON-POSITIVE estimate") +
                  ", " + num(r.twin_seconds) + " s"};
}

// 6: nu_m - nu reconstructed from the balance identity at each update.
Outcome inversion_identity(const Runs& r) {
  if (!r.twin) return {false, "criterion 5 run missing"};
  const EstimationTrace& tr = *r.twin->trace;
  const auto& recs = r.twin->records;
  const ExperimentConfig c = load_reference(r, "twin_reference.cfg", "twin_a");
  bool ok = true;
  double worst_ratio = 0.0, worst_exact = 0.0;
  std::size_t checked = 0;
  for (const auto* u : tr.accepted_updates()) {
    const double known = u->nu_before - *tr.nu_true;
    // exact-identity value
    worst_exact = std::max(worst_exact, std::abs(u->delta_nu_reconstructed - known) /
                                            std::max(std::abs(known), 1e-300));
    // balance-residual bound on the segment that ends at this update
    std::vector<DiagnosticsRecord> seg;
    for (const auto& rec : recs)
      if (rec.segment == u->m - 1 && rec.t <= u->t + 1e-9) seg.push_back(rec);
    if (seg.size() < 3 || std::isnan(u->delta_nu_reconstructed_fd)) {
      ok = false;
      continue;
    }
    const PowerBalance b = power_balance(seg, c.system.mu, c.system.nu);
    const double bound = b.max_residual_E / std::abs(u->denominator);
    const double err = std::abs(u->delta_nu_reconstructed_fd - known);
    // below roundoff of the known value there is nothing left to compare
    const double floor = 1e-12 * c.system.nu;
    const double ratio = err / std::max(bound, 1e-300);
    if (err > floor) worst_ratio = std::max(worst_ratio, ratio);
    ok = ok && (err <= 10.0 * bound || err <= floor);
    ++checked;
  }
  ok = ok && checked > 0 && worst_exact <= 1e-8;
  return {ok, std::to_string(checked) + " updates, max |reconstructed - known| / residual bound = " +
                  num(worst_ratio) + " (limit 10), identity-value relative error " + num(worst_exact)};
}

// 7: energy envelope of an unforced decay and the H1 absorbing ball.
Outcome envelopes(const Runs& r) {
  const GridSpec g = grid_create(64);
  SystemParams p;
  p.nu = p.nu_tilde = 0.05;
  p.mu = 20.0;
  p.n_obs = 16;
  p.dt = 0.01;
  p.forcing.amplitude = 0.0;
  SpectralField u0 = random_field(g, 77, 12);
  u0 *= 5.0 / norm_hs(u0, 1.0);
  Integrator integ(g, p);
  RecordCollector col(integ.forcing(), 5);
  const PairState s0{0.0, u0, SpectralField(g)};
  col.record(s0, p);
  integ.integrate(s0, 10.0, &col);
  const BoundReport free_decay = bound_checks(col.records(), integ.forcing(), p, 1e-8);
  const auto* env = free_decay.find("reference_h1_envelope");

  std::size_t ball_samples = 0, ball_violations = 0;
  for (const auto* run : {&r.sync, &r.twin}) {
    if (!*run) return {false, "criteria 4-5 runs missing"};
    const auto* b = (*run)->bounds->find("reference_h1_ball");
    if (!b) return {false, "no absorbing-ball check recorded"};
    ball_samples += b->samples;
    ball_violations += b->violations;
  }
  const bool ok = env && env->samples == col.records().size() && env->violations == 0 &&
                  ball_samples > 0 && ball_violations == 0;
  return {ok, "unforced envelope: " + std::to_string(env ? env->violations : 0) + " violations in " +
                  std::to_string(env ? env->samples : 0) + " samples; forced H1 ball: " +
                  std::to_string(ball_violations) + " violations in " + std::to_string(ball_samples) +
                  " samples"};
}

// 8: algebraic relations at every record of the criteria 4-5 runs.
Outcome diagnostics_algebra(const Runs& r) {
  std::size_t records = 0, violations = 0;
  for (const auto* run : {&r.sync, &r.twin}) {
    if (!*run) return {false, "criteria 4-5 runs missing"};
    const RunSummary& s = **run;
    ExperimentConfig c = load_reference(r, s.mode == RunMode::twin ? "twin_reference.cfg" : "sync_only.cfg", "tmp");
    SystemParams p = resolved_system(c);
    const SpectralField g = make_forcing(p.forcing, grid_create(c.n));
    double stats_nt = -1.0;
    ForceStats st;
    for (const auto& rec : s.records) {
      ++records;
      if (rec.nu_tilde != stats_nt) {
        p.nu_tilde = rec.nu_tilde;
        st = force_stats(g, p);
        stats_nt = rec.nu_tilde;
      }
      bool ok = rec.E_N <= rec.E && rec.Z_N <= rec.Z && rec.P_N <= rec.P;
      ok = ok && rec.E <= rec.Z && rec.Z <= rec.P && rec.D >= 0.0;
      ok = ok && st.G <= st.G_tilde;
      for (const auto& [l, sv] : st.sigma) ok = ok && sv >= 1.0;
      if (!ok) ++violations;
    }
  }
  return {violations == 0 && records > 0,
          std::to_string(violations) + " violating records of " + std::to_string(records)};
}

// 9: identical artifacts from a second run of the criterion 5 configuration.
Outcome determinism(Runs& r) {
  if (!r.twin) return {false, "criterion 5 run missing"};
  ExperimentConfig c = load_reference(r, "twin_reference.cfg", "twin_b");
  c.run.record_stride = 1;
  const RunSummary again = run_experiment(c);
  std::size_t compared = 0;
  std::vector<std::string> differ;
  for (const auto& [name, file] : r.twin->artifacts) {
    const fs::path a = fs::path(r.twin->output_dir) / file, b = fs::path(again.output_dir) / file;
    if (file.ends_with(".csv") || file.ends_with(".json")) {
      ++compared;
      if (slurp(a) != slurp(b) || slurp(a).empty()) differ.push_back(file);
    }
  }
  std::string detail = std::to_string(compared) + " CSV/JSON artifacts compared";
  for (const auto& f : differ) detail += ", differs: " + f;
  return {differ.empty() && compared >= 4 && again.artifacts == r.twin->artifacts, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string out = "acceptance_out";
  std::string source = NUDGEVISC_SOURCE_DIR;
  app.add_option("--output-dir", out, "directory for run artifacts");
  app.add_option("--source-dir", source, "project root holding configs/");
  CLI11_PARSE(app, argc, argv);

  Runs runs;
  runs.out = out;
  runs.source_dir = source;
  fs::create_directories(runs.out);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"bilinear orthogonality", [] { return orthogonality(); }},
      {"convolution oracle", [] { return convolution_oracle(); }},
      {"balance identity order", [&] { return balance_identity(runs); }},
      {"synchronisation", [&] { return synchronisation(runs); }},
      {"estimator convergence", [&] { return estimator_convergence(runs); }},
      {"inversion identity", [&] { return inversion_identity(runs); }},
      {"envelope bounds", [&] { return envelopes(runs); }},
      {"diagnostics algebra", [&] { return diagnostics_algebra(runs); }},
      {"determinism", [&] { return determinism(runs); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
