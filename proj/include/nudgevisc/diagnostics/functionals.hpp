#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "nudgevisc/errors.hpp"
#include "nudgevisc/spectral/operators.hpp"

namespace nudgevisc {

/// Half squared L2, H1 and H2 norms of w and of its low-mode part P_N w.
struct EnergyFunctionals {
  double E = 0.0, E_N = 0.0;
  double Z = 0.0, Z_N = 0.0;
  double P = 0.0, P_N = 0.0;
};

inline EnergyFunctionals energy_functionals(const SpectralField& w, int n_obs) {
  if (n_obs < 1 || n_obs > w.grid().dealias_cutoff) {
    throw invalid_cutoff("observation cutoff " + std::to_string(n_obs) + " outside [1, " +
                         std::to_string(w.grid().dealias_cutoff) + "]");
  }
  // single pass instead of building P_N w
  double e = 0, en = 0, z = 0, zn = 0, p = 0, pn = 0;
  const int n2 = n_obs * n_obs;
  auto a = w.component(0), b = w.component(1);
  for_each_mode(w.grid(), [&](int k1, int k2, std::size_t i) {
    const int q = k1 * k1 + k2 * k2;
    if (q == 0) return;
    const double m = std::norm(a[i]) + std::norm(b[i]);
    const double dq = static_cast<double>(q);
    e += m;
    z += dq * m;
    p += dq * dq * m;
    if (q <= n2) {
      en += m;
      zn += dq * m;
      pn += dq * dq * m;
    }
  });
  const double h = 0.5 * kPlancherel;
  return {h * e, h * en, h * z, h * zn, h * p, h * pn};
}

/// The power terms of the observed error balance, together with the pieces
/// they are assembled from.
///
///   trilinear_B  = <B(w, w_N), Q_N w>
///   trilinear_DB = <B(u, w) + B(w, u), w_N>
///   denominator  = <A u~_N, w_N>
///   J1 = trilinear_B - trilinear_DB - dnu * denominator
///   J2 = -<B(w, w), A w_N> - <B(u, w) + B(w, u), A w_N> - dnu <A u~_N, A w_N>
struct PowerTerms {
  double J1 = 0.0;
  double J2 = 0.0;
  double trilinear_B = 0.0;
  double trilinear_DB = 0.0;
  double denominator = 0.0;
};

namespace detail {

inline PowerTerms power_terms_unchecked(const SpectralField& u, const SpectralField& u_tilde,
                                        const SpectralField& w, int n_obs, double delta_nu) {
  const SpectralField wn = lowpass(w, n_obs);
  const SpectralField qw = highpass(w, n_obs);
  const SpectralField awn = stokes_apply(wn, 2.0);
  const SpectralField aun = stokes_apply(lowpass(u_tilde, n_obs), 2.0);
  SpectralField db = bilinear(u, w);
  db += bilinear(w, u);
  const SpectralField bww = bilinear(w, w);

  PowerTerms r;
  r.trilinear_B = inner_hs(bilinear(w, wn), qw, 0.0);
  r.trilinear_DB = inner_hs(db, wn, 0.0);
  r.denominator = inner_hs(aun, wn, 0.0);
  r.J1 = r.trilinear_B - r.trilinear_DB - delta_nu * r.denominator;
  r.J2 = -inner_hs(bww, awn, 0.0) - inner_hs(db, awn, 0.0) - delta_nu * inner_hs(aun, awn, 0.0);
  return r;
}

inline void require_error_consistent(const SpectralField& u, const SpectralField& u_tilde,
                                     const SpectralField& w) {
  u.require_same_grid(u_tilde);
  u.require_same_grid(w);
  SpectralField d = u_tilde - u;
  d -= w;
  const double scale = std::max({max_coefficient(u), max_coefficient(u_tilde), 1e-300});
  const double defect = max_coefficient(d);
  if (defect > 1e-10 * scale) {
    throw contract_violation("w differs from u~ - u by " + std::to_string(defect) +
                             " (relative to " + std::to_string(scale) + ")");
  }
}

}  // namespace detail

/// J1 and J2 for the triple (u, u~, w); w must equal u~ - u to 1e-10
/// relative to the larger of the two flows.
inline PowerTerms compute_J(const SpectralField& u, const SpectralField& u_tilde,
                            const SpectralField& w, int n_obs, double delta_nu) {
  detail::require_error_consistent(u, u_tilde, w);
  return detail::power_terms_unchecked(u, u_tilde, w, n_obs, delta_nu);
}

/// Eight times the coercive part of the power balance,
///   8 mu^3 E_N^2 + 32 mu^2 nu E_N Z_N + 16 mu nu^2 E_N P_N
///   + 16 nu^3 Z_N P_N + 24 mu nu^2 Z_N^2 + 2 mu J1^2.
inline double dissipation_D(double E_N, double Z_N, double P_N, double J1, double mu,
                            double nu) {
  return 8.0 * mu * mu * mu * E_N * E_N + 32.0 * mu * mu * nu * E_N * Z_N +
         16.0 * mu * nu * nu * E_N * P_N + 16.0 * nu * nu * nu * Z_N * P_N +
         24.0 * mu * nu * nu * Z_N * Z_N + 2.0 * mu * J1 * J1;
}

/// The four magnitudes that bound the post-update viscosity error, and
/// their sum relative to the update denominator.
struct ErrorDecomposition {
  double edot = 0.0;          // |dE_N/dt|
  double viscous = 0.0;       // 2 nu Z_N
  double trilinear_B = 0.0;   // |<B(w, w_N), Q_N w>|
  double trilinear_DB = 0.0;  // |<(DB u) w, w_N>|
  double sum = 0.0;
  double denominator = 0.0;   // <A u~_N, w_N>, signed
  double budget = 0.0;        // sum / |denominator|
  bool degenerate = false;
};

/// `edot_N` is the observed-energy power at the same instant (from the
/// balance identity or a difference quotient, at the caller's choice).
inline ErrorDecomposition update_error_decomposition(const SpectralField& u,
                                                     const SpectralField& u_tilde,
                                                     const SpectralField& w, int n_obs,
                                                     double nu, double edot_N) {
  const PowerTerms t = compute_J(u, u_tilde, w, n_obs, 0.0);
  const EnergyFunctionals f = energy_functionals(w, n_obs);
  ErrorDecomposition d;
  d.edot = std::abs(edot_N);
  d.viscous = 2.0 * nu * f.Z_N;
  d.trilinear_B = std::abs(t.trilinear_B);
  d.trilinear_DB = std::abs(t.trilinear_DB);
  d.sum = d.edot + d.viscous + d.trilinear_B + d.trilinear_DB;
  d.denominator = t.denominator;
  d.degenerate = !(std::abs(t.denominator) > 0.0);
  d.budget = d.degenerate ? (d.sum == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                          : d.sum / std::abs(t.denominator);
  return d;
}

/// nu~ - nu solved from the observed-energy balance:
///   (-edot_N - 2 nu Z_N + trilinear_B - trilinear_DB - 2 mu E_N) / denominator
inline double reconstruct_delta_nu(const PowerTerms& t, const EnergyFunctionals& f,
                                   double edot_N, double mu, double nu) {
  return (-edot_N - 2.0 * nu * f.Z_N + t.trilinear_B - t.trilinear_DB - 2.0 * mu * f.E_N) /
         t.denominator;
}

}  // namespace nudgevisc
