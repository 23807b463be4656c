#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "nudgevisc/diagnostics/force_stats.hpp"
#include "nudgevisc/diagnostics/functionals.hpp"
#include "nudgevisc/errors.hpp"
#include "nudgevisc/flow/integrator.hpp"

namespace nudgevisc {

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

/// Snapshot of every scalar diagnostic at one instant.  Fields that were not
/// evaluated hold NaN.
struct DiagnosticsRecord {
  double t = kUnset;
  int segment = 0;  // index of the constant-viscosity interval
  double nu_tilde = kUnset;
  double E = kUnset, E_N = kUnset, Z = kUnset, Z_N = kUnset, P = kUnset, P_N = kUnset;
  double Edot_N = kUnset;     // balance identity
  double Edot_N_fd = kUnset;  // centred difference of E_N
  double Zdot_N = kUnset;
  double Zdot_N_fd = kUnset;
  double J1 = kUnset, J2 = kUnset, D = kUnset;
  double trilinear_B = kUnset, trilinear_DB = kUnset;
  double denominator = kUnset;  // <A u~_N, w_N>
  double nondegen_margin = kUnset;
  /// norms[f][s] = norm_hs(field, s), f = 0: u, 1: u~, 2: w; s = 0..3
  std::array<std::array<double, 4>, 3> norms{{{kUnset, kUnset, kUnset, kUnset},
                                              {kUnset, kUnset, kUnset, kUnset},
                                              {kUnset, kUnset, kUnset, kUnset}}};
  /// signed margins in condition_ids() order
  std::array<double, 7> condition_margins{kUnset, kUnset, kUnset, kUnset, kUnset, kUnset, kUnset};
};

/// Only the quantities the update-time policy reads: t, segment, nu~, E_N,
/// the denominator and the non-degeneracy margin.
inline DiagnosticsRecord light_record(const PairState& s, const SystemParams& p, int segment) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.segment = segment;
  r.nu_tilde = p.nu_tilde;
  const SpectralField wn = lowpass(s.w, p.n_obs);
  const SpectralField un = lowpass(s.u_tilde(), p.n_obs);
  r.E_N = 0.5 * inner_hs(wn, wn, 0.0);
  r.denominator = inner_hs(un, wn, 1.0);
  r.nondegen_margin = std::abs(r.denominator);
  return r;
}

/// Full record.  `stats` must describe the same force and parameters; when
/// it is null (unforced runs) the condition margins stay NaN.
inline DiagnosticsRecord make_record(const PairState& s, const SystemParams& p,
                                     const ForceStats* stats, int segment) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.segment = segment;
  r.nu_tilde = p.nu_tilde;
  const SpectralField ut = s.u_tilde();
  const EnergyFunctionals f = energy_functionals(s.w, p.n_obs);
  r.E = f.E;
  r.E_N = f.E_N;
  r.Z = f.Z;
  r.Z_N = f.Z_N;
  r.P = f.P;
  r.P_N = f.P_N;
  const PowerTerms j = detail::power_terms_unchecked(s.u, ut, s.w, p.n_obs, p.delta_nu());
  r.J1 = j.J1;
  r.J2 = j.J2;
  r.trilinear_B = j.trilinear_B;
  r.trilinear_DB = j.trilinear_DB;
  r.denominator = j.denominator;
  r.nondegen_margin = std::abs(j.denominator);
  r.Edot_N = j.J1 - 2.0 * p.mu * f.E_N - 2.0 * p.nu * f.Z_N;
  r.Zdot_N = j.J2 - 2.0 * p.mu * f.Z_N - 2.0 * p.nu * f.P_N;
  r.D = dissipation_D(f.E_N, f.Z_N, f.P_N, j.J1, p.mu, p.nu);
  const SpectralField* fields[3] = {&s.u, &ut, &s.w};
  for (int a = 0; a < 3; ++a)
    for (int q = 0; q < 4; ++q) r.norms[a][q] = norm_hs(*fields[a], q);
  if (stats != nullptr) {
    const ConditionReport rep = verify_mu_conditions(p, *stats);
    for (std::size_t i = 0; i < r.condition_margins.size(); ++i)
      r.condition_margins[i] = rep.checks[i].margin;
  }
  return r;
}

/// Fills Edot_N_fd / Zdot_N_fd by centred differences wherever both
/// neighbours belong to the same segment and are equally spaced.
inline void fill_finite_differences(std::vector<DiagnosticsRecord>& recs) {
  for (std::size_t i = 1; i + 1 < recs.size(); ++i) {
    const auto& a = recs[i - 1];
    const auto& b = recs[i + 1];
    auto& r = recs[i];
    if (a.segment != r.segment || b.segment != r.segment) continue;
    const double h1 = r.t - a.t, h2 = b.t - r.t;
    if (!(h1 > 0.0) || std::abs(h1 - h2) > 1e-9 * h1) continue;
    r.Edot_N_fd = (b.E_N - a.E_N) / (b.t - a.t);
    r.Zdot_N_fd = (b.Z_N - a.Z_N) / (b.t - a.t);
  }
}

/// Sink that builds a full record every stride.
class RecordCollector : public DiagnosticsSink {
 public:
  RecordCollector(const SpectralField& g, long stride, int segment = 0)
      : DiagnosticsSink(stride), g_(g), forced_(!g.is_zero()), segment_(segment) {}

  void record(const PairState& s, const SystemParams& p) override {
    if (forced_ && (!have_stats_ || p.nu_tilde != stats_nu_tilde_ || p.mu != stats_mu_)) {
      stats_ = force_stats(g_, p);
      stats_nu_tilde_ = p.nu_tilde;
      stats_mu_ = p.mu;
      have_stats_ = true;
    }
    records_.push_back(make_record(s, p, forced_ ? &stats_ : nullptr, segment_));
  }

  void set_segment(int segment) noexcept { segment_ = segment; }
  std::vector<DiagnosticsRecord>& records() noexcept { return records_; }
  const std::vector<DiagnosticsRecord>& records() const noexcept { return records_; }

 private:
  SpectralField g_;
  bool forced_;
  int segment_;
  ForceStats stats_;
  double stats_nu_tilde_ = 0.0, stats_mu_ = 0.0;
  bool have_stats_ = false;
  std::vector<DiagnosticsRecord> records_;
};

/// Balance identity against centred differences over a window.
struct PowerBalance {
  std::vector<double> t;
  std::vector<double> Edot_N, Zdot_N;        // identity
  std::vector<double> Edot_N_fd, Zdot_N_fd;  // centred differences
  std::vector<double> residual_E, residual_Z;
  double max_residual_E = 0.0;
  double max_residual_Z = 0.0;
};

/// Evaluates the observed-energy and observed-enstrophy balances on the
/// interior points of a uniformly spaced window of full records of one
/// constant-viscosity interval.  Throws if fewer than three records are given.
inline PowerBalance power_balance(std::span<const DiagnosticsRecord> recs, double mu, double nu) {
  if (recs.size() < 3) throw contract_violation("power_balance: window needs at least 3 records");
  const double h = recs[1].t - recs[0].t;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const double hi = recs[i].t - recs[i - 1].t;
    if (!(hi > 0.0) || std::abs(hi - h) > 1e-9 * h)
      throw contract_violation("power_balance: records are not uniformly spaced");
    if (recs[i].segment != recs[0].segment)
      throw contract_violation("power_balance: window spans a viscosity update");
  }
  PowerBalance b;
  for (std::size_t i = 1; i + 1 < recs.size(); ++i) {
    const auto& r = recs[i];
    const double ed = r.J1 - 2.0 * mu * r.E_N - 2.0 * nu * r.Z_N;
    const double zd = r.J2 - 2.0 * mu * r.Z_N - 2.0 * nu * r.P_N;
    const double span = recs[i + 1].t - recs[i - 1].t;
    const double efd = (recs[i + 1].E_N - recs[i - 1].E_N) / span;
    const double zfd = (recs[i + 1].Z_N - recs[i - 1].Z_N) / span;
    b.t.push_back(r.t);
    b.Edot_N.push_back(ed);
    b.Zdot_N.push_back(zd);
    b.Edot_N_fd.push_back(efd);
    b.Zdot_N_fd.push_back(zfd);
    b.residual_E.push_back(ed - efd);
    b.residual_Z.push_back(zd - zfd);
    b.max_residual_E = std::max(b.max_residual_E, std::abs(ed - efd));
    b.max_residual_Z = std::max(b.max_residual_Z, std::abs(zd - zfd));
  }
  return b;
}

}  // namespace nudgevisc
