#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "nudgevisc/errors.hpp"
#include "nudgevisc/flow/params.hpp"
#include "nudgevisc/spectral/operators.hpp"

namespace nudgevisc {

/// Size and shape of the force.  With mu = 0 the modified Grashof number
/// and everything built on it are +inf.
struct ForceStats {
  double g_norm = 0.0;
  double G = 0.0;
  double G_tilde = 0.0;
  std::map<int, double> sigma;  // l -> |A^(l/2) g| / |g|, l = 0..k_max
  std::map<int, double> R;      // k -> absorbing-ball radius, k = 1..k_max
  double K0 = 0.0, K1 = 0.0, K2 = 0.0;
};

inline double modified_grashof(double G, double nu, double nu_tilde, double mu) {
  if (!(mu > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt((nu / nu_tilde) * (nu / mu) + 1.0) * G;
}

inline ForceStats force_stats(const SpectralField& g, const SystemParams& p, int k_max = 3) {
  if (k_max < 1) throw invalid_parameter("force_stats: k_max must be >= 1");
  ForceStats s;
  s.g_norm = norm_hs(g, 0.0);
  if (!(s.g_norm > 0.0)) throw invalid_parameter("force_stats: shape factors need a nonzero force");
  const ConditionConstants& c = p.constants;
  const double nu = p.nu;
  s.G = s.g_norm / (nu * nu);
  s.G_tilde = modified_grashof(s.G, nu, p.nu_tilde, p.mu);
  for (int l = 0; l <= std::max(k_max, 2); ++l) s.sigma[l] = norm_hs(g, static_cast<double>(l)) / s.g_norm;

  s.R[1] = std::sqrt(2.0) * nu * s.G;
  for (int k = 2; k <= k_max; ++k) {
    const double base = std::pow(s.sigma[k - 1], 1.0 / k) + s.G;
    s.R[k] = c.radius_c(k) * nu * std::pow(base, k - 1) * s.G;
  }

  const double Gt = s.G_tilde;
  const double s1 = std::sqrt(s.sigma[1]);
  const double s2_3 = std::cbrt(s.sigma[2]);
  const double at1 = c.alpha_tilde(1), at2 = c.alpha_tilde(2);
  s.K0 = std::sqrt(c.get("C") * at1 * at1 * Gt * Gt);
  s.K1 = std::sqrt(c.get("C") * at2 * at2 * (s1 + Gt) * (s1 + Gt) * Gt * Gt);
  s.K2 = std::sqrt(c.get("c3") * at2 * at2 * s2_3 * s2_3 * std::pow(s2_3 + s.G, 4) * Gt * Gt);
  return s;
}

/// One inequality on mu, evaluated.  margin > 0 means satisfied: it is
/// rhs - lhs for "<=" and lhs - rhs for ">=".
struct ConditionCheck {
  std::string id;
  std::string relation;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool satisfied = false;
};

struct ConditionReport {
  std::vector<ConditionCheck> checks;
  std::map<std::string, double> constants;

  const ConditionCheck* find(const std::string& id) const {
    for (const auto& c : checks)
      if (c.id == id) return &c;
    return nullptr;
  }
  bool all_satisfied() const {
    for (const auto& c : checks)
      if (!c.satisfied) return false;
    return true;
  }
};

/// Fixed order of the condition identifiers (also the CSV column order).
inline const std::array<const char*, 7>& condition_ids() {
  static const std::array<const char*, 7> ids = {
      "observer_wellposed",   // mu <= c0~ N^2 nu~
      "observer_bounded",     // mu <= c0 N^2 nu
      "observer_h2_ball",     // mu >= nu a2^2 (nu/nu~) G~^2
      "observer_hk_ball",     // the H^k analogue, k = 3
      "sensitivity_decay",    // mu >= c1 nu [...]^(1/4) (s2^(1/3)+G) G
      "sensitivity_mismatch", // mu >= c2 nu (|dnu|/nu) a~2^2 (s1^(1/2)+G~)^2 G~^2
      "power_sign",           // mu >= c4 max(G,1)^2
  };
  return ids;
}

namespace detail {
inline ConditionCheck make_check(const char* id, bool upper, double lhs, double rhs) {
  ConditionCheck c;
  c.id = id;
  c.relation = upper ? "<=" : ">=";
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = upper ? rhs - lhs : lhs - rhs;
  c.satisfied = upper ? lhs <= rhs : lhs >= rhs;
  return c;
}
}  // namespace detail

/// Advisory report on the sufficient conditions for the observer bounds,
/// the sensitivity estimate and the power estimate.  `hk` selects the
/// Sobolev index of the higher-order observer condition (>= 3).
inline ConditionReport verify_mu_conditions(const SystemParams& p, const ForceStats& s,
                                            int hk = 3) {
  if (hk < 3) throw invalid_parameter("verify_mu_conditions: hk must be >= 3");
  const ConditionConstants& c = p.constants;
  const double nu = p.nu, nt = p.nu_tilde, mu = p.mu;
  const double N2 = static_cast<double>(p.n_obs) * p.n_obs;
  const double G = s.G, Gt = s.G_tilde;
  auto sig = [&](int l) {
    auto it = s.sigma.find(l);
    if (it == s.sigma.end()) throw invalid_parameter("verify_mu_conditions: sigma_" +
                                                     std::to_string(l) + " not computed");
    return it->second;
  };
  const double s1h = std::sqrt(sig(1));
  const double s2t = std::cbrt(sig(2));
  const double sk = std::pow(sig(hk - 1), 1.0 / hk);
  const double at1 = c.alpha_tilde(1), at2 = c.alpha_tilde(2);
  const double k = static_cast<double>(hk);

  ConditionReport r;
  r.checks.push_back(detail::make_check(condition_ids()[0], true, mu, c.get("c0_tilde") * N2 * nt));
  r.checks.push_back(detail::make_check(condition_ids()[1], true, mu, c.get("c0") * N2 * nu));

  const double a2 = c.alpha(2);
  r.checks.push_back(
      detail::make_check(condition_ids()[2], false, mu, nu * a2 * a2 * (nu / nt) * Gt * Gt));

  const double ak = c.alpha(hk);
  const double hk_rhs =
      nu * ak * ak *
      ((at1 * at1 + at2 * at2) * (s1h + Gt) * Gt +
       std::pow(at2, 2.0 / k) * std::pow(nu / nt, 1.0 - 2.0 / k) * std::pow((sk + G) / G, 2.0 / k) *
           (s1h + G) / (sk + G));
  r.checks.push_back(detail::make_check(condition_ids()[3], false, mu, hk_rhs));

  const double a = (s1h + G) * (s1h + G) + std::pow(s2t + G, 4);
  r.checks.push_back(detail::make_check(condition_ids()[4], false, mu,
                                        c.get("c1") * nu * std::pow(a, 0.25) * (s2t + G) * G));

  const double rel = std::abs(p.delta_nu()) / nu;
  r.checks.push_back(detail::make_check(condition_ids()[5], false, mu,
                                        c.get("c2") * nu * rel * at2 * at2 * (s1h + Gt) *
                                            (s1h + Gt) * Gt * Gt));

  const double gm = std::max(G, 1.0);
  r.checks.push_back(detail::make_check(condition_ids()[6], false, mu, c.get("c4") * gm * gm));

  for (const char* name : {"c0", "c0_tilde", "c1", "c2", "c3", "c4", "C"}) r.constants[name] = c.get(name);
  for (int j = 1; j <= hk; ++j) {
    r.constants["alpha_" + std::to_string(j)] = c.alpha(j);
    r.constants["alpha_tilde_" + std::to_string(j)] = c.alpha_tilde(j);
    r.constants["radius_c_" + std::to_string(j)] = c.radius_c(j);
  }
  for (const auto& [name, value] : c.overrides()) r.constants[name] = value;
  return r;
}

}  // namespace nudgevisc
