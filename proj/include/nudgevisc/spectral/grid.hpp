#pragma once

#include <cstddef>
#include <numbers>
#include <string>

#include "nudgevisc/errors.hpp"

namespace nudgevisc {

/// Plancherel factor of the unitary Fourier convention.
///
/// Coefficients are v^(k) = (2 pi)^-2 * integral of v(x) e^{-i k.x} over the
/// periodic box [0, 2 pi]^2, so v(x) = sum_k v^(k) e^{i k.x}.  Every L2-type
/// norm and inner product in the library multiplies the coefficient sum by
/// this factor, which makes |v| the true L2(T^2) norm.  This is the only
/// place the constant is defined.
inline constexpr double kPlancherel = 4.0 * std::numbers::pi * std::numbers::pi;

/// Resolution and dealiasing metadata of the periodic box [0, 2 pi]^2.
///
/// Coefficient storage follows the FFT ordering: index i in [0, n) carries
/// wavenumber i for i <= n/2 and i - n otherwise, i.e. the lattice
/// {-n/2+1, ..., n/2} in each component.
struct GridSpec {
  int n = 0;
  /// Largest retained |k_i| after a quadratic product (two-thirds rule).
  int dealias_cutoff = 0;
  /// Physical grid used for products.  Equals n unless n is divisible by 3,
  /// in which case the truncated product would alias onto |k_i| = n/3 and the
  /// transform is padded.
  int product_n = 0;

  static constexpr double domain_length = 2.0 * std::numbers::pi;

  std::size_t size() const noexcept { return static_cast<std::size_t>(n) * n; }

  int wavenumber(int index) const noexcept { return index <= n / 2 ? index : index - n; }

  int index(int k) const noexcept { return ((k % n) + n) % n; }

  std::size_t flat(int k1, int k2) const noexcept {
    return static_cast<std::size_t>(index(k1)) * n + index(k2);
  }

  /// True when (k1, k2) is a representable lattice point.
  bool on_lattice(int k1, int k2) const noexcept {
    return k1 > -n / 2 && k1 <= n / 2 && k2 > -n / 2 && k2 <= n / 2;
  }

  bool in_dealiased_band(int k1, int k2) const noexcept {
    return k1 >= -dealias_cutoff && k1 <= dealias_cutoff && k2 >= -dealias_cutoff &&
           k2 <= dealias_cutoff;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline GridSpec grid_create(int n) {
  if (n < 8 || n % 2 != 0) {
    throw invalid_grid("grid size must be even and >= 8, got " + std::to_string(n));
  }
  GridSpec g;
  g.n = n;
  g.dealias_cutoff = n / 3;
  int m = n;
  if (3 * g.dealias_cutoff >= m) {
    m = 3 * g.dealias_cutoff + 1;
    if (m % 2 != 0) ++m;
  }
  g.product_n = m;
  return g;
}

}  // namespace nudgevisc
