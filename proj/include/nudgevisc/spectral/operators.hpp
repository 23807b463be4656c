#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "nudgevisc/errors.hpp"
#include "nudgevisc/spectral/fft.hpp"
#include "nudgevisc/spectral/field.hpp"
#include "nudgevisc/spectral/grid.hpp"

namespace nudgevisc {

namespace detail {

/// |k|^(2s) for |k|^2 = q, with an exact integer-power path for the common
/// Sobolev indices.
inline double sobolev_weight(int q, double s) noexcept {
  if (q == 0) return 0.0;
  const double two_s = 2.0 * s;
  if (two_s == std::floor(two_s) && std::abs(two_s) <= 12.0) {
    const int p = static_cast<int>(two_s);
    if (p % 2 == 0) {
      double r = 1.0;
      const double base = p >= 0 ? static_cast<double>(q) : 1.0 / q;
      for (int i = 0; i < std::abs(p) / 2; ++i) r *= base;
      return r;
    }
  }
  return std::pow(static_cast<double>(q), s);
}

inline bool zero_mean(const SpectralField& v) noexcept {
  return v.at(0, 0, 0) == complex{} && v.at(1, 0, 0) == complex{};
}

inline void require_zero_mean(const SpectralField& v, const char* op) {
  if (!zero_mean(v)) {
    throw contract_violation(std::string(op) + ": input field has a nonzero mean mode");
  }
}

inline void leray_inplace(SpectralField& v) noexcept {
  auto a = v.component(0);
  auto b = v.component(1);
  for_each_mode(v.grid(), [&](int k1, int k2, std::size_t i) {
    const int q = k1 * k1 + k2 * k2;
    if (q == 0) {
      a[i] = b[i] = complex{};
      return;
    }
    const complex kv = (static_cast<double>(k1) * a[i] + static_cast<double>(k2) * b[i]) /
                       static_cast<double>(q);
    a[i] -= static_cast<double>(k1) * kv;
    b[i] -= static_cast<double>(k2) * kv;
  });
}

/// Places (f^1 + i f^2)(k), optionally multiplied by i k_dir, on the m x m
/// product grid and synthesises f^1(x) + i f^2(x).
inline void synthesize_packed(const SpectralField& f, int dir, fft_buffer& out, int m) {
  const GridSpec& g = f.grid();
  std::fill_n(out.data(), out.size(), complex{});
  auto a = f.component(0);
  auto b = f.component(1);
  for_each_mode(g, [&](int k1, int k2, std::size_t i) {
    complex c = a[i] + complex{0.0, 1.0} * b[i];
    if (dir == 0) c *= complex{0.0, static_cast<double>(k1)};
    if (dir == 1) c *= complex{0.0, static_cast<double>(k2)};
    const std::size_t j = static_cast<std::size_t>(((k1 % m) + m) % m) * m + ((k2 % m) + m) % m;
    out[j] = c;
  });
  plan_for(m).backward(out);
}

/// Forward-transforms a packed physical product p^1 + i p^2, separates the
/// two real fields, truncates to the dealiased band and Leray-projects.
inline SpectralField analyze_packed(fft_buffer& z, int m, const GridSpec& g) {
  plan_for(m).forward(z);
  const double scale = 1.0 / (static_cast<double>(m) * m);
  SpectralField out(g);
  const int kc = g.dealias_cutoff;
  for (int k1 = -kc; k1 <= kc; ++k1) {
    for (int k2 = -kc; k2 <= kc; ++k2) {
      const std::size_t j = static_cast<std::size_t>(((k1 % m) + m) % m) * m + ((k2 % m) + m) % m;
      const std::size_t jm =
          static_cast<std::size_t>(((-k1 % m) + m) % m) * m + ((-k2 % m) + m) % m;
      const complex zk = z[j] * scale;
      const complex zmk = std::conj(z[jm] * scale);
      out.at(0, k1, k2) = 0.5 * (zk + zmk);
      out.at(1, k1, k2) = complex{0.0, -0.5} * (zk - zmk);
    }
  }
  out.at(0, 0, 0) = out.at(1, 0, 0) = complex{};
  leray_inplace(out);
  return out;
}

}  // namespace detail

/// Leray projection onto solenoidal fields, mode by mode.
inline SpectralField leray_project(const SpectralField& v) {
  detail::require_zero_mean(v, "leray_project");
  SpectralField out = v;
  detail::leray_inplace(out);
  return out;
}

/// A^(s/2) v: multiplies each coefficient by |k|^s.  Negative s is allowed
/// since the mean mode is empty.
inline SpectralField stokes_apply(const SpectralField& v, double s) {
  detail::require_zero_mean(v, "stokes_apply");
  SpectralField out(v.grid());
  if (s == 0.0) return v;
  auto a = v.component(0), b = v.component(1);
  auto oa = out.component(0), ob = out.component(1);
  for_each_mode(v.grid(), [&](int k1, int k2, std::size_t i) {
    const int q = k1 * k1 + k2 * k2;
    if (q == 0) return;
    // |k|^s = (|k|^2)^(s/2)
    const double f = detail::sobolev_weight(q, 0.5 * s);
    oa[i] = f * a[i];
    ob[i] = f * b[i];
  });
  return out;
}

/// B(u, v) = P_sigma[(u . grad) v], pseudo-spectrally with the two-thirds
/// rule: the product is formed in physical space on the product grid and
/// truncated to max(|k_1|, |k_2|) <= dealias_cutoff.
inline SpectralField bilinear(const SpectralField& u, const SpectralField& v) {
  u.require_same_grid(v);
  const GridSpec& g = u.grid();
  const int m = g.product_n;
  const std::size_t mm = static_cast<std::size_t>(m) * m;
  detail::fft_buffer pu(mm), dx(mm), dy(mm);
  detail::synthesize_packed(u, -1, pu, m);
  detail::synthesize_packed(v, 0, dx, m);
  detail::synthesize_packed(v, 1, dy, m);
  for (std::size_t j = 0; j < mm; ++j) {
    // (u.grad)v^1 + i (u.grad)v^2 = u^1 d_1 v + u^2 d_2 v, packed.
    dx[j] = pu[j].real() * dx[j] + pu[j].imag() * dy[j];
  }
  return detail::analyze_packed(dx, m, g);
}

/// P_N: keeps modes with Euclidean |k| <= N.
inline SpectralField lowpass(const SpectralField& v, int cutoff) {
  if (cutoff < 1 || cutoff > v.grid().dealias_cutoff) {
    throw invalid_cutoff("lowpass cutoff " + std::to_string(cutoff) + " outside [1, " +
                         std::to_string(v.grid().dealias_cutoff) + "]");
  }
  SpectralField out(v.grid());
  const int n2 = cutoff * cutoff;
  auto a = v.component(0), b = v.component(1);
  auto oa = out.component(0), ob = out.component(1);
  for_each_mode(v.grid(), [&](int k1, int k2, std::size_t i) {
    if (k1 * k1 + k2 * k2 <= n2) {
      oa[i] = a[i];
      ob[i] = b[i];
    }
  });
  return out;
}

/// Q_N = I - P_N, formed by zeroing rather than subtracting, so that
/// lowpass(v) + highpass(v) reproduces v exactly.
inline SpectralField highpass(const SpectralField& v, int cutoff) {
  if (cutoff < 1 || cutoff > v.grid().dealias_cutoff) {
    throw invalid_cutoff("highpass cutoff " + std::to_string(cutoff) + " outside [1, " +
                         std::to_string(v.grid().dealias_cutoff) + "]");
  }
  SpectralField out(v.grid());
  const int n2 = cutoff * cutoff;
  auto a = v.component(0), b = v.component(1);
  auto oa = out.component(0), ob = out.component(1);
  for_each_mode(v.grid(), [&](int k1, int k2, std::size_t i) {
    if (k1 * k1 + k2 * k2 > n2) {
      oa[i] = a[i];
      ob[i] = b[i];
    }
  });
  return out;
}

/// Real part of the weighted L2 product, (2 pi)^2 Re sum |k|^(2s) u^(k).conj(v^(k)).
inline double inner_hs(const SpectralField& u, const SpectralField& v, double s) {
  u.require_same_grid(v);
  double acc = 0.0;
  auto ua = u.component(0), ub = u.component(1);
  auto va = v.component(0), vb = v.component(1);
  for_each_mode(u.grid(), [&](int k1, int k2, std::size_t i) {
    const int q = k1 * k1 + k2 * k2;
    if (q == 0) return;
    const double re = ua[i].real() * va[i].real() + ua[i].imag() * va[i].imag() +
                      ub[i].real() * vb[i].real() + ub[i].imag() * vb[i].imag();
    acc += detail::sobolev_weight(q, s) * re;
  });
  return kPlancherel * acc;
}

/// Homogeneous Sobolev norm (sum |k|^(2s) |v^(k)|^2)^(1/2) with the Plancherel
/// factor folded in: s = 0 gives |v|, s = 1 gives ||v||.
inline double norm_hs(const SpectralField& v, double s) {
  double acc = 0.0;
  auto a = v.component(0), b = v.component(1);
  for_each_mode(v.grid(), [&](int k1, int k2, std::size_t i) {
    const int q = k1 * k1 + k2 * k2;
    if (q == 0) return;
    acc += detail::sobolev_weight(q, s) * (std::norm(a[i]) + std::norm(b[i]));
  });
  return std::sqrt(kPlancherel * acc);
}

/// max_k |k . v^(k)|, the solenoidality defect.
inline double divergence_residual(const SpectralField& v) {
  double r = 0.0;
  auto a = v.component(0), b = v.component(1);
  for_each_mode(v.grid(), [&](int k1, int k2, std::size_t i) {
    r = std::max(r, std::abs(static_cast<double>(k1) * a[i] + static_cast<double>(k2) * b[i]));
  });
  return r;
}

/// max_k |v^(k)| over both components.
inline double max_coefficient(const SpectralField& v) {
  double r = 0.0;
  for (int c = 0; c < 2; ++c)
    for (const auto& z : v.component(c)) r = std::max(r, std::abs(z));
  return r;
}

/// Largest |v^(-k) - conj(v^(k))|; zero for a real field.
inline double conjugate_symmetry_defect(const SpectralField& v) {
  double r = 0.0;
  const GridSpec& g = v.grid();
  for_each_mode(g, [&](int k1, int k2, std::size_t) {
    if (!g.on_lattice(-k1, -k2)) return;
    for (int c = 0; c < 2; ++c)
      r = std::max(r, std::abs(v.at(c, -k1, -k2) - std::conj(v.at(c, k1, k2))));
  });
  return r;
}

/// Largest coefficient outside the dealiased band.
inline double dealias_defect(const SpectralField& v) {
  double r = 0.0;
  const GridSpec& g = v.grid();
  for_each_mode(g, [&](int k1, int k2, std::size_t i) {
    if (g.in_dealiased_band(k1, k2)) return;
    r = std::max({r, std::abs(v.component(0)[i]), std::abs(v.component(1)[i])});
  });
  return r;
}

}  // namespace nudgevisc
