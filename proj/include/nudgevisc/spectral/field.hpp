#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "nudgevisc/errors.hpp"
#include "nudgevisc/spectral/grid.hpp"

namespace nudgevisc {

using complex = std::complex<double>;

/// Real 2D vector field on the periodic box, held as Fourier coefficients
/// (u^1(k), u^2(k)) over the full lattice of its grid.
///
/// The type itself stores whatever it is given; the solenoidal, zero-mean and
/// conjugate-symmetric invariants are established by the operators that
/// produce fields (leray_project, bilinear, the integrator).
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const GridSpec& grid)
      : grid_(grid), c_{std::vector<complex>(grid.size()), std::vector<complex>(grid.size())} {}

  const GridSpec& grid() const noexcept { return grid_; }

  std::span<complex> component(int c) noexcept { return c_[c]; }
  std::span<const complex> component(int c) const noexcept { return c_[c]; }

  complex& at(int c, int k1, int k2) noexcept { return c_[c][grid_.flat(k1, k2)]; }
  const complex& at(int c, int k1, int k2) const noexcept { return c_[c][grid_.flat(k1, k2)]; }

  /// Sets the coefficient at k and its conjugate partner at -k.
  void set_mode(int k1, int k2, complex a1, complex a2) noexcept {
    at(0, k1, k2) = a1;
    at(1, k1, k2) = a2;
    at(0, -k1, -k2) = std::conj(a1);
    at(1, -k1, -k2) = std::conj(a2);
  }

  bool is_zero() const noexcept {
    for (const auto& comp : c_)
      for (const auto& z : comp)
        if (z != complex{}) return false;
    return true;
  }

  bool all_finite() const noexcept {
    for (const auto& comp : c_)
      for (const auto& z : comp)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  SpectralField& operator+=(const SpectralField& o) {
    require_same_grid(o);
    for (int c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < c_[c].size(); ++i) c_[c][i] += o.c_[c][i];
    return *this;
  }

  SpectralField& operator-=(const SpectralField& o) {
    require_same_grid(o);
    for (int c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < c_[c].size(); ++i) c_[c][i] -= o.c_[c][i];
    return *this;
  }

  SpectralField& operator*=(double s) noexcept {
    for (auto& comp : c_)
      for (auto& z : comp) z *= s;
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

  /// Exact coefficient-wise equality.
  friend bool operator==(const SpectralField& a, const SpectralField& b) {
    return a.grid_ == b.grid_ && a.c_ == b.c_;
  }

  void require_same_grid(const SpectralField& o) const {
    if (!(grid_ == o.grid_)) {
      throw incompatible_grids("fields live on grids of size " + std::to_string(grid_.n) +
                               " and " + std::to_string(o.grid_.n));
    }
  }

 private:
  GridSpec grid_;
  std::array<std::vector<complex>, 2> c_;
};

/// Calls f(k1, k2, flat_index) for every lattice point, in storage order.
template <class F>
void for_each_mode(const GridSpec& g, F&& f) {
  std::size_t idx = 0;
  for (int i1 = 0; i1 < g.n; ++i1) {
    const int k1 = g.wavenumber(i1);
    for (int i2 = 0; i2 < g.n; ++i2, ++idx) f(k1, g.wavenumber(i2), idx);
  }
}

}  // namespace nudgevisc
