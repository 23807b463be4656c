#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "nudgevisc/errors.hpp"
#include "nudgevisc/spectral/field.hpp"
#include "nudgevisc/spectral/grid.hpp"

namespace nudgevisc {

/// The unnamed absolute constants of the a-priori bounds and mu-conditions
/// (c0, c0_tilde, c1..c4, C, alpha_k, alpha_tilde_k, radius_c_k).  They are
/// existence-level in the analysis, so every one defaults to 1 and can be
/// overridden by name.
class ConditionConstants {
 public:
  double get(const std::string& name) const {
    auto it = values_.find(name);
    return it == values_.end() ? 1.0 : it->second;
  }
  void set(const std::string& name, double value) { values_[name] = value; }
  const std::map<std::string, double>& overrides() const noexcept { return values_; }

  double alpha(int k) const { return get("alpha_" + std::to_string(k)); }
  double alpha_tilde(int k) const { return get("alpha_tilde_" + std::to_string(k)); }
  double radius_c(int k) const { return get("radius_c_" + std::to_string(k)); }

  /// Whether `name` is a recognised constant key.
  static bool known(const std::string& name) {
    static const char* fixed[] = {"c0", "c0_tilde", "c1", "c2", "c3", "c4", "C"};
    for (const char* f : fixed)
      if (name == f) return true;
    for (const char* prefix : {"alpha_tilde_", "alpha_", "radius_c_"}) {
      const std::string p = prefix;
      if (name.rfind(p, 0) == 0 && name.size() > p.size()) {
        const std::string rest = name.substr(p.size());
        if (rest.find_first_not_of("0123456789") == std::string::npos) return true;
      }
    }
    return false;
  }

 private:
  std::map<std::string, double> values_;
};

enum class ForcingKind { single_mode, band };

/// Descriptor of the body force f; the solver uses g = P_sigma f.
///
/// single_mode: f = amplitude * (k_perp / |k|) sin(k.x + phase) with
///   k_perp = (k2, -k1), so k = (0, kf) gives (amplitude sin(kf y + phase), 0).
/// band: the same shape summed over one representative of every +/- pair of
///   lattice points with band_min <= |k| <= band_max.
struct ForcingSpec {
  ForcingKind kind = ForcingKind::single_mode;
  double amplitude = 0.0;
  int k1 = 0;
  int k2 = 2;
  double band_min = 2.0;
  double band_max = 3.0;
  double phase = 0.0;
};

struct SystemParams {
  double nu = 0.05;
  double nu_tilde = 0.05;
  double mu = 20.0;
  int n_obs = 16;
  double dt = 0.01;
  ForcingSpec forcing;
  ConditionConstants constants;

  double delta_nu() const noexcept { return nu_tilde - nu; }

  std::vector<std::string> problems(const GridSpec& g) const {
    std::vector<std::string> out;
    if (!(nu > 0.0)) out.push_back("system.nu must be > 0");
    if (!(nu_tilde > 0.0)) out.push_back("system.nu_tilde must be > 0");
    if (!(mu >= 0.0)) out.push_back("system.mu must be >= 0");
    if (!(dt > 0.0)) out.push_back("system.dt must be > 0");
    if (n_obs < 1 || n_obs > g.dealias_cutoff)
      out.push_back("system.n_obs must lie in [1, " + std::to_string(g.dealias_cutoff) + "]");
    return out;
  }

  void validate(const GridSpec& g) const {
    auto p = problems(g);
    if (!p.empty()) throw invalid_parameter(p.front());
  }
};

/// Reference flow u and observer error w = u~ - u at time t.
///
/// The pair is stored as (u, w) rather than (u, u~): the observer error
/// routinely falls ten or more orders below |u| during synchronisation and
/// forming it by subtraction would cap its relative precision.  u~ is
/// reconstructed on demand.
struct PairState {
  double t = 0.0;
  SpectralField u;
  SpectralField w;

  SpectralField u_tilde() const { return u + w; }

  static PairState from_fields(double t, const SpectralField& u, const SpectralField& u_tilde) {
    return PairState{t, u, u_tilde - u};
  }
};

}  // namespace nudgevisc
