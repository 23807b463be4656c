#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "nudgevisc/spectral/field.hpp"
#include "nudgevisc/spectral/operators.hpp"

namespace nudgevisc {

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit Mersenne
/// Twister draw.  std::uniform_real_distribution is implementation-defined,
/// which would break cross-platform reproducibility of seeded runs.
class UnitRandom {
 public:
  explicit UnitRandom(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Random real solenoidal zero-mean field with independent uniform
/// amplitudes and phases on 1 <= |k| <= k_max (k_max clipped to the
/// dealiased band).  Not normalised.
inline SpectralField random_field(const GridSpec& g, std::uint64_t seed, int k_max) {
  SpectralField v(g);
  UnitRandom rnd(seed);
  const int kc = std::min(k_max, g.dealias_cutoff);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int k1 = -kc; k1 <= kc; ++k1) {
    for (int k2 = 0; k2 <= kc; ++k2) {
      // one representative per +/- pair
      if (k2 == 0 && k1 <= 0) continue;
      if (k1 * k1 + k2 * k2 > k_max * k_max) continue;
      const double a1 = rnd(), p1 = rnd(), a2 = rnd(), p2 = rnd();
      v.set_mode(k1, k2, std::polar(a1, two_pi * p1), std::polar(a2, two_pi * p2));
    }
  }
  detail::leray_inplace(v);
  return v;
}

}  // namespace nudgevisc
