#pragma once

#include <cmath>
#include <string>

#include "nudgevisc/errors.hpp"
#include "nudgevisc/flow/params.hpp"
#include "nudgevisc/spectral/operators.hpp"

namespace nudgevisc {

namespace detail {

/// Adds amplitude * (k_perp/|k|) sin(k.x + phase) to g.  With
/// sin(th) = (e^{i th} - e^{-i th}) / 2i the coefficient at +k is
/// amplitude * k_perp/|k| * e^{i phase} / (2i).
inline void add_shear_mode(SpectralField& g, int k1, int k2, double amplitude, double phase) {
  const double norm = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
  const complex c = amplitude * std::polar(1.0, phase) / complex{0.0, 2.0};
  const complex a1 = c * (k2 / norm);
  const complex a2 = c * (-k1 / norm);
  g.at(0, k1, k2) += a1;
  g.at(1, k1, k2) += a2;
  g.at(0, -k1, -k2) += std::conj(a1);
  g.at(1, -k1, -k2) += std::conj(a2);
}

}  // namespace detail

inline SpectralField make_forcing(const ForcingSpec& spec, const GridSpec& grid) {
  SpectralField g(grid);
  const int kc = grid.dealias_cutoff;
  if (spec.kind == ForcingKind::single_mode) {
    if ((spec.k1 == 0 && spec.k2 == 0) || !grid.in_dealiased_band(spec.k1, spec.k2)) {
      throw invalid_parameter("forcing wavenumber (" + std::to_string(spec.k1) + "," +
                              std::to_string(spec.k2) + ") outside 0 < max|k_i| <= " +
                              std::to_string(kc));
    }
    detail::add_shear_mode(g, spec.k1, spec.k2, spec.amplitude, spec.phase);
  } else {
    if (!(spec.band_min > 0.0) || spec.band_max < spec.band_min || spec.band_max > kc) {
      throw invalid_parameter("forcing band must satisfy 0 < band_min <= band_max <= " +
                              std::to_string(kc));
    }
    const double lo2 = spec.band_min * spec.band_min, hi2 = spec.band_max * spec.band_max;
    for (int k1 = -kc; k1 <= kc; ++k1) {
      for (int k2 = 0; k2 <= kc; ++k2) {
        if (k2 == 0 && k1 <= 0) continue;
        const double q = static_cast<double>(k1 * k1 + k2 * k2);
        if (q < lo2 || q > hi2) continue;
        detail::add_shear_mode(g, k1, k2, spec.amplitude, spec.phase);
      }
    }
  }
  return leray_project(g);
}

/// Amplitude giving Grashof number |g| / nu^2 = grashof for the shape of `spec`.
inline double amplitude_for_grashof(ForcingSpec spec, const GridSpec& grid, double nu,
                                    double grashof) {
  spec.amplitude = 1.0;
  const double unit = norm_hs(make_forcing(spec, grid), 0.0);
  return grashof * nu * nu / unit;
}

}  // namespace nudgevisc
