#pragma once

#include <vector>

#include "nudgevisc/spectral/fft.hpp"
#include "nudgevisc/spectral/field.hpp"

namespace nudgevisc {

/// Point samples of a vector field on the uniform n x n grid
/// x_(i,j) = (2 pi i / n, 2 pi j / n), row-major in (i, j).
struct PhysicalField {
  int n = 0;
  std::vector<double> u1;
  std::vector<double> u2;
};

inline PhysicalField to_physical(const SpectralField& v) {
  const GridSpec& g = v.grid();
  detail::fft_buffer b1(g.size()), b2(g.size());
  std::copy(v.component(0).begin(), v.component(0).end(), b1.data());
  std::copy(v.component(1).begin(), v.component(1).end(), b2.data());
  const auto& plan = detail::plan_for(g.n);
  plan.backward(b1);
  plan.backward(b2);
  PhysicalField out{g.n, std::vector<double>(g.size()), std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.u1[i] = b1[i].real();
    out.u2[i] = b2[i].real();
  }
  return out;
}

/// Coefficients of the samples, unprojected: the caller decides whether the
/// result should be Leray-projected or have its mean removed.
inline SpectralField from_physical(const GridSpec& g, const PhysicalField& p) {
  detail::fft_buffer b1(g.size()), b2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    b1[i] = p.u1[i];
    b2[i] = p.u2[i];
  }
  const auto& plan = detail::plan_for(g.n);
  plan.forward(b1);
  plan.forward(b2);
  const double scale = 1.0 / static_cast<double>(g.size());
  SpectralField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.component(0)[i] = b1[i] * scale;
    out.component(1)[i] = b2[i] * scale;
  }
  return out;
}

/// Discrete L2 norm (sum |v(x_j)|^2 (2 pi / n)^2)^(1/2) of point samples.
inline double physical_l2(const PhysicalField& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.u1.size(); ++i) acc += p.u1[i] * p.u1[i] + p.u2[i] * p.u2[i];
  const double h = GridSpec::domain_length / p.n;
  return std::sqrt(acc * h * h);
}

}  // namespace nudgevisc
