#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nudgevisc/diagnostics/functionals.hpp"
#include "nudgevisc/diagnostics/record.hpp"
#include "nudgevisc/errors.hpp"
#include "nudgevisc/flow/integrator.hpp"

namespace nudgevisc {

/// Settings of the recursive viscosity update.  Non-positive min_wait or
/// plateau_window select the defaults 1/mu and 5/mu.
struct EstimatorConfig {
  double nu0 = 0.1;
  double epsilon = 1e-12;  // applied as epsilon * nu_ref^2
  double min_wait = 0.0;
  double plateau_tol = 1e-3;
  double plateau_window = 0.0;
  int max_updates = 6;

  EstimatorConfig resolved(double mu) const {
    EstimatorConfig c = *this;
    const double scale = mu > 0.0 ? 1.0 / mu : 1.0;
    if (!(c.min_wait > 0.0)) c.min_wait = scale;
    if (!(c.plateau_window > 0.0)) c.plateau_window = 5.0 * scale;
    return c;
  }

  std::vector<std::string> problems(double dt) const {
    std::vector<std::string> out;
    if (!(nu0 > 0.0)) out.push_back("estimator.nu0 must be > 0");
    if (!(epsilon > 0.0)) out.push_back("estimator.epsilon must be > 0");
    if (min_wait > 0.0 && min_wait < dt) out.push_back("estimator.min_wait must be >= system.dt");
    if (!(plateau_tol > 0.0)) out.push_back("estimator.plateau_tol must be > 0");
    if (plateau_window < 0.0) out.push_back("estimator.plateau_window must be >= 0");
    if (max_updates < 0) out.push_back("estimator.max_updates must be >= 0");
    return out;
  }
};

/// nu_m + mu |w_N|^2 / <A u~_N, w_N>.
inline double compute_update(double nu_m, double mu, const SpectralField& w_N,
                             const SpectralField& u_tilde_N) {
  const double den = inner_hs(u_tilde_N, w_N, 1.0);
  const double num = inner_hs(w_N, w_N, 0.0);
  if (den == 0.0) throw degenerate_denominator(den, "update denominator <A u~_N, w_N> vanishes");
  const double next = nu_m + mu * num / den;
  if (!std::isfinite(next)) throw degenerate_denominator(den, "update is not finite");
  return next;
}

struct NondegeneracyReport {
  double margin = 0.0;     // |<A u~_N, w_N>|
  double threshold = 0.0;  // eps * nu_ref^2
  bool passed = false;
};

inline NondegeneracyReport check_nondegeneracy(const SpectralField& u_tilde_N,
                                               const SpectralField& w_N, double eps,
                                               double nu_ref) {
  NondegeneracyReport r;
  r.margin = std::abs(inner_hs(u_tilde_N, w_N, 1.0));
  r.threshold = eps * nu_ref * nu_ref;
  r.passed = r.margin > 0.0 && r.margin >= r.threshold;
  return r;
}

enum class UpdateDecision { update_now, wait_min_wait, wait_history, wait_plateau, wait_degenerate };

inline const char* to_string(UpdateDecision d) {
  switch (d) {
    case UpdateDecision::update_now: return "update_now";
    case UpdateDecision::wait_min_wait: return "min_wait";
    case UpdateDecision::wait_history: return "short_history";
    case UpdateDecision::wait_plateau: return "no_plateau";
    case UpdateDecision::wait_degenerate: return "degenerate";
  }
  return "?";
}

/// Relative spread (max - min) / max of E_N over records with
/// t >= now - window.  NaN when the history does not reach back that far.
inline double plateau_spread(std::span<const DiagnosticsRecord> history, double now,
                             double window) {
  if (history.empty() || history.front().t > now - window + 1e-9 * window) return kUnset;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : history) {
    if (r.t < now - window - 1e-9 * window) continue;
    lo = std::min(lo, r.E_N);
    hi = std::max(hi, r.E_N);
  }
  return hi > 0.0 ? (hi - lo) / hi : 0.0;
}

/// update_now iff now - last_update >= min_wait, E_N has varied by at most
/// plateau_tol (relative) over the trailing plateau_window, and the latest
/// record passes the non-degeneracy test against its own nu~.  Checks are
/// reported in that order.  `cfg` must be resolved.
inline UpdateDecision select_update_time(std::span<const DiagnosticsRecord> history,
                                         const EstimatorConfig& cfg, double now,
                                         double last_update) {
  if (now - last_update < cfg.min_wait * (1.0 - 1e-9)) return UpdateDecision::wait_min_wait;
  const double spread = plateau_spread(history, now, cfg.plateau_window);
  if (std::isnan(spread)) return UpdateDecision::wait_history;
  if (spread > cfg.plateau_tol) return UpdateDecision::wait_plateau;
  const auto& last = history.back();
  const double threshold = cfg.epsilon * last.nu_tilde * last.nu_tilde;
  if (!(last.nondegen_margin > 0.0) || last.nondegen_margin < threshold)
    return UpdateDecision::wait_degenerate;
  return UpdateDecision::update_now;
}

/// One attempted update.
struct UpdateRecord {
  int m = 0;             // 1-based index among accepted updates (0 when skipped)
  double t = 0.0;
  double nu_before = 0.0;
  double nu_after = kUnset;  // NaN when skipped
  double denominator = 0.0;
  double E_N = 0.0;
  bool accepted = false;
  std::string skip_reason;
  double threshold = 0.0;  // eps * nu_ref^2
  /// Twin mode only (NaN otherwise).
  double beta = kUnset;
  bool nondegenerate_true_nu = false;  // |den| >= eps nu^2 with the true nu
  double Edot_N = kUnset;              // balance identity at t_m^-
  double Edot_N_fd = kUnset;           // second-order backward difference
  double delta_nu_reconstructed = kUnset;     // from the identity value
  double delta_nu_reconstructed_fd = kUnset;  // from the difference quotient
  double balance_residual = kUnset;           // Edot_N - Edot_N_fd
  ErrorDecomposition decomposition;
};

struct EstimationTrace {
  std::optional<double> nu_true;
  double nu0 = 0.0;
  std::vector<UpdateRecord> updates;  // accepted and skipped, in time order
  std::vector<double> beta;           // per accepted update, twin mode
  double final_nu = 0.0;
  int accepted = 0;
  PairState final_state;

  std::vector<const UpdateRecord*> accepted_updates() const {
    std::vector<const UpdateRecord*> out;
    for (const auto& u : updates)
      if (u.accepted) out.push_back(&u);
    return out;
  }
};

/// Options of the estimation loop that are not part of the algorithm.
struct EstimationOptions {
  double t_final = 10.0;
  std::optional<double> nu_true;  // twin mode
  DiagnosticsSink* sink = nullptr;
  /// called after every accepted update with the new segment index
  std::function<void(int segment)> on_segment;
};

/// Runs the pair from pair0 to t_final with the observer viscosity starting
/// at cfg.nu0 and updated by compute_update whenever select_update_time
/// allows.  Updates use the state of the last completed step; the observer
/// state is carried over unchanged.  Guard failures are recorded as skipped
/// updates (at most one per min_wait) and never abort the run.
inline EstimationTrace run_estimation(const PairState& pair0, SystemParams p,
                                      const EstimatorConfig& cfg_in, const EstimationOptions& opt) {
  const EstimatorConfig cfg = cfg_in.resolved(p.mu);
  {
    auto probs = cfg.problems(p.dt);
    if (!probs.empty()) throw invalid_parameter(probs.front());
  }
  p.nu_tilde = cfg.nu0;
  Integrator integ(pair0.u.grid(), p);
  EstimationTrace trace;
  trace.nu_true = opt.nu_true;
  trace.nu0 = cfg.nu0;

  PairState s = pair0;
  int segment = 0;
  double last_update = s.t;
  double retry_after = -std::numeric_limits<double>::infinity();
  double last_skip_logged = -std::numeric_limits<double>::infinity();
  std::deque<DiagnosticsRecord> history;
  const double keep = cfg.plateau_window + 2.0 * p.dt;
  long step = 0;
  const long stride = opt.sink ? opt.sink->stride() : 1;

  history.push_back(light_record(s, integ.params(), segment));
  if (opt.sink) opt.sink->record(s, integ.params());

  const long total = static_cast<long>(std::llround((opt.t_final - s.t) / p.dt));
  const double t_start = s.t;
  for (long i = 1; i <= total; ++i) {
    s = integ.step_pair(s);
    s.t = t_start + static_cast<double>(i) * p.dt;
    ++step;
    history.push_back(light_record(s, integ.params(), segment));
    while (!history.empty() && history.front().t < s.t - keep) history.pop_front();
    if (opt.sink && step % stride == 0) opt.sink->record(s, integ.params());

    if (trace.accepted >= cfg.max_updates || s.t < retry_after) continue;
    const std::vector<DiagnosticsRecord> hv(history.begin(), history.end());
    const UpdateDecision d = select_update_time(hv, cfg, s.t, last_update);
    if (d == UpdateDecision::wait_min_wait || d == UpdateDecision::wait_history ||
        d == UpdateDecision::wait_plateau)
      continue;

    const SystemParams& cur = integ.params();
    UpdateRecord u;
    u.t = s.t;
    u.nu_before = cur.nu_tilde;
    u.denominator = history.back().denominator;
    u.E_N = history.back().E_N;
    u.threshold = cfg.epsilon * cur.nu_tilde * cur.nu_tilde;

    if (d == UpdateDecision::wait_degenerate) {
      if (s.t - last_skip_logged >= cfg.min_wait * (1.0 - 1e-9)) {
        u.skip_reason = "degenerate";
        trace.updates.push_back(u);
        last_skip_logged = s.t;
      }
      continue;
    }

    // left-limit diagnostics for the trace
    const SpectralField ut = s.u_tilde();
    const PowerTerms pt = detail::power_terms_unchecked(s.u, ut, s.w, cur.n_obs, cur.delta_nu());
    const EnergyFunctionals ef = energy_functionals(s.w, cur.n_obs);
    u.Edot_N = pt.J1 - 2.0 * cur.mu * ef.E_N - 2.0 * cur.nu * ef.Z_N;
    const std::size_t h = hv.size();
    if (h >= 3 && hv[h - 3].segment == segment) {
      u.Edot_N_fd = (3.0 * hv[h - 1].E_N - 4.0 * hv[h - 2].E_N + hv[h - 3].E_N) / (2.0 * p.dt);
      u.balance_residual = u.Edot_N - u.Edot_N_fd;
    }
    if (pt.denominator != 0.0) {
      u.delta_nu_reconstructed = reconstruct_delta_nu(pt, ef, u.Edot_N, cur.mu, cur.nu);
      if (!std::isnan(u.Edot_N_fd))
        u.delta_nu_reconstructed_fd = reconstruct_delta_nu(pt, ef, u.Edot_N_fd, cur.mu, cur.nu);
    }
    u.decomposition = update_error_decomposition(s.u, ut, s.w, cur.n_obs, cur.nu, u.Edot_N);
    if (opt.nu_true) {
      u.nondegenerate_true_nu =
          std::abs(pt.denominator) >= cfg.epsilon * *opt.nu_true * *opt.nu_true;
    }

    double next = 0.0;
    try {
      next = compute_update(cur.nu_tilde, cur.mu, lowpass(s.w, cur.n_obs),
                            lowpass(ut, cur.n_obs));
    } catch (const degenerate_denominator&) {
      u.skip_reason = "degenerate";
      trace.updates.push_back(u);
      retry_after = s.t + cfg.min_wait;
      continue;
    }
    if (!(next > 0.0)) {
      u.skip_reason = "non_positive";
      u.nu_after = kUnset;
      trace.updates.push_back(u);
      retry_after = s.t + cfg.min_wait;
      continue;
    }

    u.accepted = true;
    u.m = ++trace.accepted;
    u.nu_after = next;
    if (opt.nu_true) {
      const double before = std::abs(u.nu_before - *opt.nu_true);
      u.beta = before > 0.0 ? std::abs(next - *opt.nu_true) / before : kUnset;
      trace.beta.push_back(u.beta);
    }
    trace.updates.push_back(u);
    integ.set_observer_viscosity(next);
    ++segment;
    if (opt.on_segment) opt.on_segment(segment);
    last_update = s.t;
  }
  // records after the last full stride are not emitted; the final state is
  if (opt.sink && step % stride != 0) opt.sink->record(s, integ.params());
  trace.final_nu = integ.params().nu_tilde;
  trace.final_state = std::move(s);
  return trace;
}

}  // namespace nudgevisc
