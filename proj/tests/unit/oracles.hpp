#pragma once

// Independent reference computations used by the tests.  Nothing here calls
// the library's transforms or operators.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "nudgevisc/spectral/field.hpp"

namespace oracle {

using nudgevisc::complex;
using nudgevisc::GridSpec;
using nudgevisc::SpectralField;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kBoxArea = kTwoPi * kTwoPi;

/// Mode list of a field: wavenumber and the two coefficients.
struct Mode {
  int k1, k2;
  complex a, b;
};

inline std::vector<Mode> modes(const SpectralField& v) {
  std::vector<Mode> out;
  nudgevisc::for_each_mode(v.grid(), [&](int k1, int k2, std::size_t i) {
    const complex a = v.component(0)[i], b = v.component(1)[i];
    if (a != complex{} || b != complex{}) out.push_back({k1, k2, a, b});
  });
  return out;
}

/// P_sigma[(u.grad)v] by direct convolution over every pair of modes
/// (p from u, q from v, p + q = k), then the per-mode projector
/// I - k k^T / |k|^2 and the two-thirds truncation.
inline SpectralField convolution_bilinear(const SpectralField& u, const SpectralField& v) {
  const GridSpec& g = u.grid();
  SpectralField out(g);
  const auto mu = modes(u), mv = modes(v);
  for (const auto& p : mu) {
    for (const auto& q : mv) {
      const int k1 = p.k1 + q.k1, k2 = p.k2 + q.k2;
      if (std::abs(k1) > g.dealias_cutoff || std::abs(k2) > g.dealias_cutoff) continue;
      // (u^(p) . i q) v^(q)
      const complex adv = complex{0.0, 1.0} * (p.a * static_cast<double>(q.k1) +
                                               p.b * static_cast<double>(q.k2));
      out.at(0, k1, k2) += adv * q.a;
      out.at(1, k1, k2) += adv * q.b;
    }
  }
  nudgevisc::for_each_mode(g, [&](int k1, int k2, std::size_t i) {
    const double q = k1 * k1 + k2 * k2;
    complex& a = out.component(0)[i];
    complex& b = out.component(1)[i];
    if (q == 0) {
      a = b = complex{};
      return;
    }
    const complex kd = (static_cast<double>(k1) * a + static_cast<double>(k2) * b) / q;
    a -= static_cast<double>(k1) * kd;
    b -= static_cast<double>(k2) * kd;
  });
  return out;
}

/// v(x, y) by summing the Fourier series directly.
inline std::pair<double, double> evaluate(const SpectralField& v, double x, double y) {
  complex s1{}, s2{};
  for (const auto& m : modes(v)) {
    const complex e = std::polar(1.0, m.k1 * x + m.k2 * y);
    s1 += m.a * e;
    s2 += m.b * e;
  }
  return {s1.real(), s2.real()};
}

/// Riemann sum of f over the n x n grid of [0, 2 pi]^2.  Exact for
/// trigonometric polynomials of degree < n in each variable.
template <class F>
double box_integral(int n, F&& f) {
  double acc = 0.0;
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc += f(i * h, j * h);
  return acc * h * h;
}

/// Largest |a - b| over all coefficients divided by the largest |b|.
inline double relative_max_diff(const SpectralField& a, const SpectralField& b) {
  double d = 0.0, s = 0.0;
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < a.component(c).size(); ++i) {
      d = std::max(d, std::abs(a.component(c)[i] - b.component(c)[i]));
      s = std::max(s, std::abs(b.component(c)[i]));
    }
  return s > 0.0 ? d / s : d;
}

}  // namespace oracle

namespace oracle {

/// (2 pi)^2 Re sum |k|^(2s) a(k).conj(b(k)), written out independently.
inline double inner(const SpectralField& a, const SpectralField& b, double s) {
  double acc = 0.0;
  nudgevisc::for_each_mode(a.grid(), [&](int k1, int k2, std::size_t i) {
    const double q = k1 * k1 + k2 * k2;
    if (q == 0) return;
    const complex z = a.component(0)[i] * std::conj(b.component(0)[i]) +
                      a.component(1)[i] * std::conj(b.component(1)[i]);
    acc += std::pow(q, s) * z.real();
  });
  return kBoxArea * acc;
}

/// Modes with |k|^2 <= n2 (keep = true) or > n2 (keep = false).
inline SpectralField ball(const SpectralField& v, int n, bool keep) {
  SpectralField out(v.grid());
  nudgevisc::for_each_mode(v.grid(), [&](int k1, int k2, std::size_t i) {
    if ((k1 * k1 + k2 * k2 <= n * n) == keep) {
      out.component(0)[i] = v.component(0)[i];
      out.component(1)[i] = v.component(1)[i];
    }
  });
  return out;
}

}  // namespace oracle
