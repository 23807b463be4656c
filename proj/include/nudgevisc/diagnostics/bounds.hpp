#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nudgevisc/diagnostics/force_stats.hpp"
#include "nudgevisc/diagnostics/record.hpp"

namespace nudgevisc {

/// Satisfaction of one a-priori bound along a record stream.
struct BoundSummary {
  std::string id;
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// min over samples of (rhs - lhs) / max(|rhs|, tiny); negative when violated
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_t = kUnset;
  std::vector<bool> ok;  // per record, in stream order

  BoundSummary() = default;
  explicit BoundSummary(std::string name) : id(std::move(name)) {}
};

struct BoundReport {
  std::vector<BoundSummary> bounds;
  std::size_t total_violations() const {
    std::size_t n = 0;
    for (const auto& b : bounds) n += b.violations;
    return n;
  }
  const BoundSummary* find(const std::string& id) const {
    for (const auto& b : bounds)
      if (b.id == id) return &b;
    return nullptr;
  }
};

namespace detail {
inline void tally(BoundSummary& b, double t, double lhs, double rhs, double rel_tol) {
  const bool ok = lhs <= rhs + rel_tol * std::abs(rhs) || (std::isinf(rhs) && rhs > 0);
  const double scale = std::max(std::abs(rhs), 1e-300);
  const double margin = std::isinf(rhs) ? std::numeric_limits<double>::infinity() : (rhs - lhs) / scale;
  ++b.samples;
  if (!ok) ++b.violations;
  if (margin < b.worst_margin) {
    b.worst_margin = margin;
    b.worst_t = t;
  }
  b.ok.push_back(ok);
}
}  // namespace detail

/// Checks, at every record:
///   reference_h1_envelope  ||u(t)||^2 <= e^{-nu(t-t0)} ||u(t0)||^2 + nu^2 G^2 (1 - e^{-nu(t-t0)})
///   reference_h1_ball      ||u|| <= sqrt(2) nu G
///   observer_h1_ball       ||u~||^2 <= a~1^2 nu^2 G~^2
///   observer_h2_ball       |A u~| <= nu a~2 s1^(1/2) (s1^(1/2) + G) G~
///   observer_h3_ball       |A^(3/2) u~| <= nu a~3 s2^(1/3) (s2^(1/3) + G)^2 G~
///   error_l2_decay         E(t) <= e^{-mu(t-tau)} E(tau) + nu^2 (nu/mu) (dnu/nu)^2 K0^2
///   error_h1_decay         Z(t) <= e^{-mu(t-tau)} Z(tau) + nu^2 (nu/mu) (dnu/nu)^2 K1^2
///   error_h2_decay         |Aw(t)|^2 <= e^{-mu(t-tau)} |Aw(tau)|^2 + nu^2 (nu/mu) (dnu/nu)^2 K2^2
/// t0 is the first record, tau the first record of each constant-viscosity
/// segment.  Without forcing only the envelope is checked.  Records need
/// their norms and energy functionals filled.
inline BoundReport bound_checks(std::span<const DiagnosticsRecord> recs, const SpectralField& g,
                                const SystemParams& p, double rel_tol = 1e-8) {
  BoundReport rep;
  if (recs.empty()) return rep;
  const bool forced = !g.is_zero();
  const double nu = p.nu;
  const double G = norm_hs(g, 0.0) / (nu * nu);

  BoundSummary env{"reference_h1_envelope"};
  BoundSummary ball{"reference_h1_ball"};
  BoundSummary h1{"observer_h1_ball"}, h2{"observer_h2_ball"}, h3{"observer_h3_ball"};
  BoundSummary el2{"error_l2_decay"}, eh1{"error_h1_decay"}, eh2{"error_h2_decay"};

  const double t0 = recs.front().t;
  const double u0sq = recs.front().norms[0][1] * recs.front().norms[0][1];
  const ConditionConstants& c = p.constants;
  std::optional<ForceStats> stats;
  double stats_nt = -1.0;
  std::size_t seg_start = 0;

  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    if (i == 0 || r.segment != recs[i - 1].segment) seg_start = i;
    const double decay = std::exp(-nu * (r.t - t0));
    const double u1 = r.norms[0][1];
    detail::tally(env, r.t, u1 * u1, decay * u0sq + nu * nu * G * G * (1.0 - decay), rel_tol);
    if (!forced) continue;

    SystemParams q = p;
    q.nu_tilde = r.nu_tilde;
    if (!stats || stats_nt != r.nu_tilde) {
      stats = force_stats(g, q);
      stats_nt = r.nu_tilde;
    }
    const ForceStats& s = *stats;
    const double Gt = s.G_tilde;
    detail::tally(ball, r.t, u1, std::sqrt(2.0) * nu * G, rel_tol);

    const double at1 = c.alpha_tilde(1), at2 = c.alpha_tilde(2), at3 = c.alpha_tilde(3);
    const double s1h = std::sqrt(s.sigma.at(1)), s2t = std::cbrt(s.sigma.at(2));
    detail::tally(h1, r.t, r.norms[1][1] * r.norms[1][1], at1 * at1 * nu * nu * Gt * Gt, rel_tol);
    detail::tally(h2, r.t, r.norms[1][2], nu * at2 * s1h * (s1h + G) * Gt, rel_tol);
    detail::tally(h3, r.t, r.norms[1][3], nu * at3 * s2t * (s2t + G) * (s2t + G) * Gt, rel_tol);

    const auto& tau = recs[seg_start];
    const double dnu = r.nu_tilde - nu;
    const double e = p.mu > 0.0 ? std::exp(-p.mu * (r.t - tau.t)) : 1.0;
    const double floor_scale =
        p.mu > 0.0 ? nu * nu * (nu / p.mu) * (dnu / nu) * (dnu / nu)
                   : (dnu == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    detail::tally(el2, r.t, r.E, e * tau.E + floor_scale * s.K0 * s.K0, rel_tol);
    detail::tally(eh1, r.t, r.Z, e * tau.Z + floor_scale * s.K1 * s.K1, rel_tol);
    const double aw = r.norms[2][2], aw0 = tau.norms[2][2];
    detail::tally(eh2, r.t, aw * aw, e * aw0 * aw0 + floor_scale * s.K2 * s.K2, rel_tol);
  }
  rep.bounds.push_back(std::move(env));
  if (forced) {
    for (auto* b : {&ball, &h1, &h2, &h3, &el2, &eh1, &eh2}) rep.bounds.push_back(std::move(*b));
  }
  return rep;
}

}  // namespace nudgevisc
