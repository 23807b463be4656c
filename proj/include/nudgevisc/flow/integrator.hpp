#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "nudgevisc/errors.hpp"
#include "nudgevisc/flow/forcing.hpp"
#include "nudgevisc/flow/params.hpp"
#include "nudgevisc/spectral/fft.hpp"
#include "nudgevisc/spectral/operators.hpp"

namespace nudgevisc {

/// Receives the pair state every `stride` steps of integrate_window.
class DiagnosticsSink {
 public:
  explicit DiagnosticsSink(long stride = 1) : stride_(stride < 1 ? 1 : stride) {}
  virtual ~DiagnosticsSink() = default;
  long stride() const noexcept { return stride_; }
  virtual void record(const PairState& state, const SystemParams& p) = 0;

 private:
  long stride_;
};

namespace detail {

/// Nonlinear terms of one stage.
///   reference: B(u, u)
///   error:     B(u~, u~) - B(u, u) = B(w, w) + B(u, w) + B(w, u)
/// The error term is assembled in physical space as (w.grad)u~ + (u.grad)w,
/// which never subtracts two O(|u|) quantities.
struct NonlinearTerms {
  SpectralField reference;
  SpectralField error;
};

inline NonlinearTerms nonlinear_terms(const SpectralField& u, const SpectralField* w) {
  const GridSpec& g = u.grid();
  const int m = g.product_n;
  const std::size_t mm = static_cast<std::size_t>(m) * m;
  fft_buffer pu(mm), ux(mm), uy(mm);
  synthesize_packed(u, -1, pu, m);
  synthesize_packed(u, 0, ux, m);
  synthesize_packed(u, 1, uy, m);
  NonlinearTerms out;
  if (w == nullptr) {
    for (std::size_t j = 0; j < mm; ++j) ux[j] = pu[j].real() * ux[j] + pu[j].imag() * uy[j];
    out.reference = analyze_packed(ux, m, g);
    out.error = SpectralField(g);
    return out;
  }
  fft_buffer pw(mm), wx(mm), wy(mm);
  synthesize_packed(*w, -1, pw, m);
  synthesize_packed(*w, 0, wx, m);
  synthesize_packed(*w, 1, wy, m);
  for (std::size_t j = 0; j < mm; ++j) {
    const double u1 = pu[j].real(), u2 = pu[j].imag();
    const double w1 = pw[j].real(), w2 = pw[j].imag();
    const complex nu_j = u1 * ux[j] + u2 * uy[j];
    const complex ne_j = w1 * (ux[j] + wx[j]) + w2 * (uy[j] + wy[j]) + u1 * wx[j] + u2 * wy[j];
    ux[j] = nu_j;
    wx[j] = ne_j;
  }
  out.reference = analyze_packed(ux, m, g);
  out.error = analyze_packed(wx, m, g);
  return out;
}

}  // namespace detail

/// Second-order integrating-factor Runge-Kutta (Heun) stepper for the pair
///
///   du/dt + nu A u + B(u, u) = g
///   dw/dt + (nu~ A + mu P_N) w = -(nu~ - nu) A u - [B(u~, u~) - B(u, u)]
///
/// which is the reference/nudged-observer system written for w = u~ - u.
/// The mode-diagonal linear parts are integrated exactly through
/// exp(-L h); the advection terms and the viscosity-mismatch source are
/// explicit.  With w = 0 and nu~ = nu the error equation has an identically
/// zero right-hand side, so a synchronised pair stays synchronised exactly.
class Integrator {
 public:
  Integrator(const GridSpec& grid, const SystemParams& p)
      : grid_(grid), p_(p), g_(make_forcing(p.forcing, grid)), q_(grid.size()) {
    p_.validate(grid_);
    for_each_mode(grid_, [&](int k1, int k2, std::size_t i) { q_[i] = k1 * k1 + k2 * k2; });
    const double gnorm = norm_hs(g_, 0.0);
    h1_limit_ = gnorm > 0.0 ? 1e6 * std::sqrt(2.0) * gnorm / p_.nu : 0.0;
    rebuild_cache();
  }

  const GridSpec& grid() const noexcept { return grid_; }
  const SystemParams& params() const noexcept { return p_; }
  const SpectralField& forcing() const noexcept { return g_; }

  /// Changes the observer viscosity; takes effect from the next step.
  void set_observer_viscosity(double nu_tilde) {
    if (!(nu_tilde > 0.0)) throw invalid_parameter("observer viscosity must be > 0");
    p_.nu_tilde = nu_tilde;
    rebuild_cache();
  }

  /// Per-mode factor exp(-h (nu~ |k|^2 + mu 1_{|k|<=N})) applied to the observer error.
  double observer_propagator(int k1, int k2, double h) const {
    const int q = k1 * k1 + k2 * k2;
    return std::exp(-h * observer_rate(q));
  }

  double reference_propagator(int k1, int k2, double h) const {
    return std::exp(-h * p_.nu * (k1 * k1 + k2 * k2));
  }

  /// Coupled step of length h (defaults to dt).
  PairState step_pair(const PairState& s, double h = -1.0) const {
    if (h <= 0.0) h = p_.dt;
    Propagators local;
    const Propagators& E = propagators_for(h, local);
    const double dnu = p_.delta_nu();

    auto stage_a = detail::nonlinear_terms(s.u, &s.w);
    SpectralField au = forcing_minus(stage_a.reference);
    SpectralField aw = mismatch_source(s.u, dnu, stage_a.error);

    SpectralField us(grid_), ws(grid_);
    combine(us, E.reference, s.u, h, au);
    combine(ws, E.observer, s.w, h, aw);

    auto stage_b = detail::nonlinear_terms(us, &ws);
    SpectralField bu = forcing_minus(stage_b.reference);
    SpectralField bw = mismatch_source(us, dnu, stage_b.error);

    PairState out{s.t + h, SpectralField(grid_), SpectralField(grid_)};
    finish(out.u, E.reference, s.u, h, au, bu);
    finish(out.w, E.observer, s.w, h, aw, bw);
    check(out);
    return out;
  }

  /// Reference-only step (the observer error is not computed).
  SpectralField step_reference_field(const SpectralField& u, double t, double h = -1.0) const {
    if (h <= 0.0) h = p_.dt;
    Propagators local;
    const Propagators& E = propagators_for(h, local);
    auto na = detail::nonlinear_terms(u, nullptr);
    SpectralField au = forcing_minus(na.reference);
    SpectralField us(grid_);
    combine(us, E.reference, u, h, au);
    auto nb = detail::nonlinear_terms(us, nullptr);
    SpectralField bu = forcing_minus(nb.reference);
    SpectralField out(grid_);
    finish(out, E.reference, u, h, au, bu);
    check_field(out, t + h, "reference");
    return out;
  }

  /// Advances the pair to t_end.  A window whose length is an integer
  /// number of steps (to 1e-9 relative) takes exactly that many steps and
  /// lands on t_end exactly, so consecutive windows compose bit for bit.
  PairState integrate(PairState s, double t_end, DiagnosticsSink* sink = nullptr) const {
    if (t_end < s.t) throw contract_violation("integrate_window: t_end precedes state time");
    const double t0 = s.t;
    const double span = (t_end - t0) / p_.dt;
    long full = static_cast<long>(std::llround(span));
    double tail = 0.0;
    if (std::abs(span - static_cast<double>(full)) > 1e-9 * std::max(1.0, span)) {
      full = static_cast<long>(std::floor(span));
      tail = t_end - (t0 + static_cast<double>(full) * p_.dt);
    }
    long counter = 0;
    for (long i = 1; i <= full; ++i) {
      s = step_pair(s);
      s.t = (i == full && tail == 0.0) ? t_end : t0 + static_cast<double>(i) * p_.dt;
      if (sink && ++counter % sink->stride() == 0) sink->record(s, p_);
    }
    if (tail > 0.0) {
      s = step_pair(s, tail);
      s.t = t_end;
      if (sink && ++counter % sink->stride() == 0) sink->record(s, p_);
    }
    return s;
  }

  /// H1 radius beyond which a run is declared blown up (0: only the
  /// non-finite check applies).
  double h1_limit() const noexcept { return h1_limit_; }

 private:
  struct Propagators {
    double h = 0.0;
    std::vector<double> reference;
    std::vector<double> observer;
  };

  double observer_rate(int q) const noexcept {
    return p_.nu_tilde * q + (q <= p_.n_obs * p_.n_obs && q > 0 ? p_.mu : 0.0);
  }

  void fill(Propagators& E, double h) const {
    E.h = h;
    E.reference.resize(grid_.size());
    E.observer.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      E.reference[i] = std::exp(-h * p_.nu * q_[i]);
      E.observer[i] = std::exp(-h * observer_rate(q_[i]));
    }
  }

  void rebuild_cache() { fill(cache_, p_.dt); }

  const Propagators& propagators_for(double h, Propagators& local) const {
    if (h == cache_.h) return cache_;
    fill(local, h);
    return local;
  }

  SpectralField forcing_minus(const SpectralField& b) const {
    SpectralField out = g_;
    out -= b;
    return out;
  }

  /// -(nu~ - nu) A u - error
  SpectralField mismatch_source(const SpectralField& u, double dnu,
                                const SpectralField& error) const {
    SpectralField out(grid_);
    for (int c = 0; c < 2; ++c) {
      auto o = out.component(c);
      auto uc = u.component(c);
      auto ec = error.component(c);
      for (std::size_t i = 0; i < grid_.size(); ++i) o[i] = -dnu * q_[i] * uc[i] - ec[i];
    }
    return out;
  }

  /// out = E (y + h a)
  void combine(SpectralField& out, const std::vector<double>& E, const SpectralField& y, double h,
               const SpectralField& a) const {
    for (int c = 0; c < 2; ++c) {
      auto o = out.component(c);
      auto yc = y.component(c);
      auto ac = a.component(c);
      for (std::size_t i = 0; i < grid_.size(); ++i) o[i] = E[i] * (yc[i] + h * ac[i]);
    }
  }

  /// out = E (y + h/2 a) + h/2 b
  void finish(SpectralField& out, const std::vector<double>& E, const SpectralField& y, double h,
              const SpectralField& a, const SpectralField& b) const {
    const double hh = 0.5 * h;
    for (int c = 0; c < 2; ++c) {
      auto o = out.component(c);
      auto yc = y.component(c);
      auto ac = a.component(c);
      auto bc = b.component(c);
      for (std::size_t i = 0; i < grid_.size(); ++i) o[i] = E[i] * (yc[i] + hh * ac[i]) + hh * bc[i];
    }
  }

  void check_field(const SpectralField& f, double t, const char* what) const {
    if (!f.all_finite()) throw blow_up(t, std::string(what) + " has non-finite coefficients");
    if (h1_limit_ > 0.0) {
      const double h1 = norm_hs(f, 1.0);
      if (h1 > h1_limit_) {
        throw blow_up(t, std::string(what) + " H1 norm " + std::to_string(h1) +
                             " exceeds 1e6 R1 = " + std::to_string(h1_limit_));
      }
    }
  }

  void check(const PairState& s) const {
    check_field(s.u, s.t, "reference");
    check_field(s.w, s.t, "observer error");
  }

  GridSpec grid_;
  SystemParams p_;
  SpectralField g_;
  std::vector<int> q_;
  double h1_limit_ = 0.0;
  Propagators cache_;
};

/// Advances u by one step; u~ is left unchanged.
inline PairState step_reference(const PairState& s, const SystemParams& p) {
  Integrator integ(s.u.grid(), p);
  PairState out = s;
  SpectralField ut = s.u_tilde();
  out.u = integ.step_reference_field(s.u, s.t);
  out.w = ut - out.u;
  out.t = s.t + p.dt;
  return out;
}

/// Advances u~ by one step of the nudged system, observing the co-evolved
/// reference; u is left unchanged.
inline PairState step_nudged(const PairState& s, const SystemParams& p) {
  Integrator integ(s.u.grid(), p);
  PairState next = integ.step_pair(s);
  PairState out = s;
  out.w = next.u_tilde() - s.u;
  out.t = next.t;
  return out;
}

inline PairState integrate_window(const PairState& s, const SystemParams& p, double t_end,
                                  DiagnosticsSink* sink = nullptr) {
  Integrator integ(s.u.grid(), p);
  return integ.integrate(s, t_end, sink);
}

struct SpinUpResult {
  SpectralField u;
  double t = 0.0;
  double h1 = 0.0;
  /// R1 = sqrt(2) nu G = sqrt(2) |g| / nu.
  double radius = 0.0;
  bool inside_ball = false;
  /// (t, ||u(t)||^2) for the initial state and every step.
  std::vector<std::pair<double, double>> samples;
};

/// Integrates the reference flow alone from u0 over [0, t_spin].
inline SpinUpResult spin_up(const SpectralField& u0, const SystemParams& p, double t_spin) {
  if (!(t_spin > 0.0)) throw invalid_parameter("spin-up time must be > 0");
  Integrator integ(u0.grid(), p);
  SpinUpResult r;
  r.radius = std::sqrt(2.0) * norm_hs(integ.forcing(), 0.0) / p.nu;
  SpectralField u = u0;
  const long steps = static_cast<long>(std::ceil(t_spin / p.dt - 1e-9));
  r.samples.reserve(static_cast<std::size_t>(steps) + 1);
  const double h1_0 = norm_hs(u, 1.0);
  r.samples.emplace_back(0.0, h1_0 * h1_0);
  double t = 0.0;
  for (long i = 1; i <= steps; ++i) {
    const double h = std::min(p.dt, t_spin - t);
    u = integ.step_reference_field(u, t, h == p.dt ? -1.0 : h);
    t = i == steps ? t_spin : static_cast<double>(i) * p.dt;
    const double h1 = norm_hs(u, 1.0);
    r.samples.emplace_back(t, h1 * h1);
  }
  r.u = std::move(u);
  r.t = t_spin;
  r.h1 = norm_hs(r.u, 1.0);
  r.inside_ball = r.h1 <= r.radius;
  return r;
}

}  // namespace nudgevisc
