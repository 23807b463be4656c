#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nudgevisc/diagnostics/bounds.hpp"
#include "nudgevisc/diagnostics/record.hpp"
#include "nudgevisc/flow/integrator.hpp"
#include "nudgevisc/harness/config.hpp"
#include "nudgevisc/spectral/physical.hpp"
#include "nudgevisc/spectral/random.hpp"

namespace nudgevisc {

/// Outcome of one self-test: the worst observed value against its tolerance.
struct VerifyCheck {
  std::string suite;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
  }
};

namespace detail {

inline double rel_diff(const SpectralField& a, const SpectralField& b) {
  const double scale = std::max({max_coefficient(a), max_coefficient(b), 1e-300});
  return max_coefficient(a - b) / scale;
}

/// Random zero-mean field that is not divergence-free.
inline SpectralField random_raw_field(const GridSpec& g, std::uint64_t seed, int k_max) {
  SpectralField a = random_field(g, seed, k_max);
  SpectralField b = random_field(g, seed + 7919, k_max);
  // rotate b by 90 degrees per mode: turns solenoidal into gradient part
  SpectralField out(g);
  for_each_mode(g, [&](int k1, int k2, std::size_t i) {
    const int q = k1 * k1 + k2 * k2;
    if (q == 0) return;
    const complex s = (static_cast<double>(k2) * b.component(0)[i] -
                       static_cast<double>(k1) * b.component(1)[i]) /
                      std::sqrt(static_cast<double>(q));
    out.component(0)[i] = a.component(0)[i] + s * static_cast<double>(k1) / std::sqrt(static_cast<double>(q));
    out.component(1)[i] = a.component(1)[i] + s * static_cast<double>(k2) / std::sqrt(static_cast<double>(q));
  });
  return out;
}

class CheckList {
 public:
  explicit CheckList(std::string suite, VerifyReport& rep) : suite_(std::move(suite)), rep_(rep) {}
  /// Records max(value) over calls under `name`, to be compared with tol.
  void worst(const std::string& name, double value, double tol) {
    for (auto& c : rep_.checks) {
      if (c.suite == suite_ && c.name == name) {
        c.value = std::max(c.value, value);
        c.passed = c.value <= c.tolerance;
        return;
      }
    }
    rep_.checks.push_back({suite_, name, value, tol, value <= tol});
  }

 private:
  std::string suite_;
  VerifyReport& rep_;
};

}  // namespace detail

/// Invariant suites of the spectral operators on a verify.n grid.
inline void verify_spectral(const VerifySettings& vs, std::uint64_t seed, VerifyReport& rep) {
  const GridSpec g = grid_create(vs.n);
  detail::CheckList c("spectral_core", rep);
  const int km = g.dealias_cutoff;
  for (int s = 0; s < vs.samples; ++s) {
    const std::uint64_t base = seed * 1000003ULL + 17ULL * static_cast<std::uint64_t>(s);
    const SpectralField raw = detail::random_raw_field(g, base, km);
    const SpectralField p = leray_project(raw);
    c.worst("leray_divergence", divergence_residual(p) / max_coefficient(p), vs.tol_divergence);
    c.worst("leray_idempotent", detail::rel_diff(leray_project(p), p), 1e-14);

    const SpectralField u = random_field(g, base + 1, km);
    const SpectralField v = random_field(g, base + 2, km);
    const SpectralField b = bilinear(u, v);
    c.worst("bilinear_divergence", divergence_residual(b) / std::max(max_coefficient(b), 1e-300),
            vs.tol_divergence);
    c.worst("bilinear_dealiased", dealias_defect(b), 0.0);
    c.worst("bilinear_conjugate_symmetry", conjugate_symmetry_defect(b), 0.0);
    c.worst("bilinear_zero_mean", std::abs(b.at(0, 0, 0)) + std::abs(b.at(1, 0, 0)), 0.0);

    const double nu1 = norm_hs(u, 1.0), nv1 = norm_hs(v, 1.0);
    c.worst("orthogonality_uvv", std::abs(inner_hs(b, v, 0.0)) / (nu1 * nv1 * nv1),
            vs.tol_orthogonality);
    const SpectralField buu = bilinear(u, u);
    const double au = norm_hs(u, 2.0);
    c.worst("orthogonality_uuAu", std::abs(inner_hs(buu, stokes_apply(u, 2.0), 0.0)) / (nu1 * nu1 * au),
            vs.tol_orthogonality);

    const double alpha = 1.5 + s, beta = -0.25 * (s + 1);
    c.worst("bilinearity", detail::rel_diff(bilinear(alpha * u, beta * v), alpha * beta * b), 1e-12);

    const PhysicalField x = to_physical(u);
    c.worst("physical_roundtrip", detail::rel_diff(from_physical(g, x), u), vs.tol_roundtrip);
    c.worst("plancherel", std::abs(physical_l2(x) - norm_hs(u, 0.0)) / norm_hs(u, 0.0),
            vs.tol_plancherel);

    for (double sv : {1.0, 2.0}) {
      double inh = 0.0;
      for_each_mode(g, [&](int k1, int k2, std::size_t i) {
        const double q = k1 * k1 + k2 * k2;
        inh += std::pow(1.0 + q, sv) * (std::norm(u.component(0)[i]) + std::norm(u.component(1)[i]));
      });
      inh *= kPlancherel;
      const double hom = norm_hs(u, sv) * norm_hs(u, sv);
      const double lo = hom - inh, hi = inh - std::pow(2.0, sv) * hom;
      c.worst("norm_equivalence", std::max({lo, hi, 0.0}) / inh, 1e-14);
    }
    c.worst("poincare", std::max(0.0, norm_hs(u, 0.0) - norm_hs(u, 1.0)), 0.0);

    const int N = std::max(1, km / 2);
    const SpectralField lo = lowpass(u, N), hi = highpass(u, N);
    c.worst("lowpass_split_exact", max_coefficient(lo + hi - u), 0.0);
    double orth = 0.0;
    for (double sv : {0.0, 1.0, 2.0}) orth = std::max(orth, std::abs(inner_hs(lo, hi, sv)));
    c.worst("lowpass_split_orthogonal", orth, 0.0);
    c.worst("lowpass_idempotent", max_coefficient(lowpass(lo, N) - lo), 0.0);
  }
}

/// Short time-stepping self-tests on a verify.n grid.
inline void verify_flow(const VerifySettings& vs, std::uint64_t seed, VerifyReport& rep) {
  const GridSpec g = grid_create(vs.n);
  detail::CheckList c("flow_dynamics", rep);

  // eigenmode heat decay with no forcing
  SystemParams p;
  p.nu = p.nu_tilde = 0.07;
  p.mu = 0.0;
  p.n_obs = 1;
  p.dt = 0.01;
  p.forcing.amplitude = 0.0;
  SpectralField v(g);
  v.set_mode(0, 1, complex{0.0, -0.5}, complex{});  // (sin y, 0)
  Integrator heat(g, p);
  PairState s{0.0, v, SpectralField(g)};
  for (int i = 0; i < 10; ++i) s = heat.step_pair(s);
  c.worst("heat_decay", std::abs(s.u.at(0, 0, 1).imag() / -0.5 - std::exp(-p.nu * 0.1)), 1e-14);

  // synchronised pair with equal viscosities stays synchronised
  SystemParams q;
  q.nu = q.nu_tilde = 0.05;
  q.mu = 10.0;
  q.n_obs = std::max(1, g.dealias_cutoff / 2);
  q.dt = 0.01;
  q.forcing.amplitude = amplitude_for_grashof(q.forcing, g, q.nu, 10.0);
  Integrator pair(g, q);
  SpectralField u0 = random_field(g, seed, 4);
  u0 *= 0.1 / norm_hs(u0, 1.0);
  PairState t{0.0, u0, SpectralField(g)};
  double div = 0.0;
  for (int i = 0; i < 20; ++i) {
    t = pair.step_pair(t);
    div = std::max(div, divergence_residual(t.u) / max_coefficient(t.u));
  }
  c.worst("synchronised_stays_synchronised", max_coefficient(t.w), 0.0);
  c.worst("step_divergence", div, vs.tol_divergence);
}

/// Algebraic relations of the diagnostics on a short twin window.
inline void verify_diagnostics(const VerifySettings& vs, std::uint64_t seed, VerifyReport& rep) {
  const GridSpec g = grid_create(vs.n);
  detail::CheckList c("diagnostics", rep);
  SystemParams p;
  p.nu = 0.05;
  p.nu_tilde = 0.08;
  p.mu = 10.0;
  p.n_obs = std::max(1, g.dealias_cutoff / 2);
  p.dt = 0.01;
  p.forcing.amplitude = amplitude_for_grashof(p.forcing, g, p.nu, 10.0);
  Integrator integ(g, p);
  SpectralField u0 = random_field(g, seed + 3, 4);
  u0 *= 0.5 / norm_hs(u0, 1.0);
  PairState s{0.0, u0, -1.0 * u0};
  RecordCollector col(integ.forcing(), 5);
  col.record(s, p);
  s = integ.integrate(s, 1.0, &col);
  const ForceStats st = force_stats(integ.forcing(), p);
  double mono = 0.0, chain = 0.0, dneg = 0.0;
  for (const auto& r : col.records()) {
    mono = std::max({mono, r.E_N - r.E, r.Z_N - r.Z, r.P_N - r.P});
    chain = std::max({chain, r.E - r.Z, r.Z - r.P});
    dneg = std::max(dneg, -r.D);
  }
  c.worst("projection_monotone", mono, 0.0);
  c.worst("poincare_chain", chain, 0.0);
  c.worst("dissipation_nonnegative", dneg, 0.0);
  c.worst("grashof_ordering", std::max(0.0, st.G - st.G_tilde), 0.0);
  double smin = 1.0;
  for (const auto& [l, sv] : st.sigma) smin = std::min(smin, sv);
  c.worst("shape_factor_at_least_one", std::max(0.0, 1.0 - smin), 1e-15);
  const BoundReport br = bound_checks(col.records(), integ.forcing(), p, vs.tol_bounds);
  const BoundSummary* env = br.find("reference_h1_envelope");
  c.worst("reference_h1_envelope", env ? static_cast<double>(env->violations) : 1.0, 0.0);
}

inline VerifyReport run_verify_suites(const VerifySettings& vs, std::uint64_t seed) {
  VerifyReport rep;
  verify_spectral(vs, seed, rep);
  verify_flow(vs, seed, rep);
  verify_diagnostics(vs, seed, rep);
  return rep;
}

}  // namespace nudgevisc
