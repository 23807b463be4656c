#include <gtest/gtest.h>

#include <cmath>

#include "nudgevisc/estimator/estimator.hpp"
#include "nudgevisc/spectral/random.hpp"

using namespace nudgevisc;

namespace {

SpectralField shear(const GridSpec& g, double c) {
  SpectralField v(g);
  v.set_mode(0, 2, {0.0, -0.5 * c}, {});
  return v;
}

DiagnosticsRecord rec(double t, double e, double margin, double nt = 0.05, int seg = 0) {
  DiagnosticsRecord r;
  r.t = t;
  r.E_N = e;
  r.nondegen_margin = margin;
  r.denominator = margin;
  r.nu_tilde = nt;
  r.segment = seg;
  return r;
}

struct TwinSetup {
  SystemParams p;
  PairState pair0;
};

// Spun-up reference on 32^2 with the observer starting at rest.
TwinSetup twin_setup(double nu, double mu) {
  const GridSpec g = grid_create(32);
  TwinSetup s;
  s.p.nu = s.p.nu_tilde = nu;
  s.p.mu = mu;
  s.p.n_obs = 8;
  s.p.dt = 0.01;
  s.p.forcing.amplitude = amplitude_for_grashof(s.p.forcing, g, nu, 20.0);
  SpectralField u0 = random_field(g, 1, 8);
  u0 *= 0.1 / norm_hs(u0, 1.0);
  const SpectralField u = spin_up(u0, s.p, 20.0).u;
  s.pair0 = {0.0, u, -1.0 * u};
  return s;
}

EstimationOptions until(double t_final, std::optional<double> nu_true = std::nullopt) {
  EstimationOptions o;
  o.t_final = t_final;
  o.nu_true = nu_true;
  return o;
}

}  // namespace

TEST(ComputeUpdate, ParallelSingleMode) {
  const GridSpec g = grid_create(16);
  const SpectralField w = shear(g, 0.3);
  // <A (2w), w> = 2 |k|^2 |w|^2 with |k|^2 = 4
  EXPECT_NEAR(compute_update(0.05, 20.0, w, 2.0 * w), 0.05 + 20.0 / 8.0, 1e-15);
  EXPECT_NEAR(compute_update(0.05, 20.0, w, -1.0 * w), 0.05 - 20.0 / 4.0, 1e-14);
}

TEST(ComputeUpdate, Scaling) {
  const GridSpec g = grid_create(16);
  const SpectralField w = lowpass(random_field(g, 3, 5), 4);
  const SpectralField ut = lowpass(random_field(g, 4, 5), 4);
  const double nu = 0.05, mu = 7.0;
  const double inc = compute_update(nu, mu, w, ut) - nu;
  EXPECT_NEAR(compute_update(nu, mu, 3.0 * w, 3.0 * ut) - nu, inc, 1e-12 * std::abs(inc));
  EXPECT_NEAR(compute_update(nu, mu, 3.0 * w, ut) - nu, 3.0 * inc, 1e-12 * std::abs(inc));
  EXPECT_NEAR(compute_update(nu, 2.0 * mu, w, ut) - nu, 2.0 * inc, 1e-12 * std::abs(inc));
}

TEST(ComputeUpdate, DegenerateDenominator) {
  const GridSpec g = grid_create(16);
  SpectralField w(g), ut(g);
  w.set_mode(1, 0, {}, {0.1, 0.0});
  ut.set_mode(0, 1, {0.1, 0.0}, {});
  EXPECT_THROW(compute_update(0.05, 10.0, w, ut), degenerate_denominator);
  EXPECT_THROW(compute_update(0.05, 10.0, w, SpectralField(g)), degenerate_denominator);
}

TEST(Nondegeneracy, Examples) {
  const GridSpec g = grid_create(16);
  const SpectralField w = shear(g, 1e-3);
  const auto orth = check_nondegeneracy(shear(g, 0.0), w, 1e-12, 0.05);
  EXPECT_EQ(orth.margin, 0.0);
  EXPECT_FALSE(orth.passed);

  const auto ok = check_nondegeneracy(shear(g, 1.0), w, 1e-12, 0.05);
  EXPECT_NEAR(ok.margin, 4.0 * 2.0 * std::numbers::pi * std::numbers::pi * 1e-3, 1e-15);
  EXPECT_DOUBLE_EQ(ok.threshold, 1e-12 * 0.05 * 0.05);
  EXPECT_TRUE(ok.passed);

  const auto small = check_nondegeneracy(shear(g, 1.0), w, 1.0, 1.0);
  EXPECT_LT(small.margin, small.threshold);
  EXPECT_FALSE(small.passed);
}

TEST(SelectUpdateTime, EachDecision) {
  EstimatorConfig cfg;
  cfg = cfg.resolved(10.0);  // min_wait 0.1, window 0.5
  ASSERT_DOUBLE_EQ(cfg.min_wait, 0.1);
  ASSERT_DOUBLE_EQ(cfg.plateau_window, 0.5);
  std::vector<DiagnosticsRecord> h;
  for (int i = 0; i <= 100; ++i) h.push_back(rec(0.01 * i, 1.0, 1.0));

  EXPECT_EQ(select_update_time(h, cfg, 1.0, 0.95), UpdateDecision::wait_min_wait);
  EXPECT_EQ(select_update_time(h, cfg, 1.0, 0.9), UpdateDecision::update_now);
  EXPECT_EQ(select_update_time(std::span(h).subspan(80), cfg, 1.0, 0.0), UpdateDecision::wait_history);

  auto drift = h;
  drift[70].E_N = 1.01;
  EXPECT_EQ(select_update_time(drift, cfg, 1.0, 0.0), UpdateDecision::wait_plateau);
  drift[40].E_N = 1.01;  // outside the window
  drift[70].E_N = 1.0;
  EXPECT_EQ(select_update_time(drift, cfg, 1.0, 0.0), UpdateDecision::update_now);

  auto weak = h;
  weak.back().nondegen_margin = 1e-16;
  EXPECT_EQ(select_update_time(weak, cfg, 1.0, 0.0), UpdateDecision::wait_degenerate);
  weak.back().nondegen_margin = 0.0;
  EXPECT_EQ(select_update_time(weak, cfg, 1.0, 0.0), UpdateDecision::wait_degenerate);

  EXPECT_STREQ(to_string(UpdateDecision::wait_plateau), "no_plateau");
  EXPECT_STREQ(to_string(UpdateDecision::update_now), "update_now");
}

TEST(PlateauSpread, Relative) {
  std::vector<DiagnosticsRecord> h;
  for (int i = 0; i <= 10; ++i) h.push_back(rec(0.1 * i, 2.0 + 0.1 * i, 1.0));
  EXPECT_NEAR(plateau_spread(h, 1.0, 0.5), (3.0 - 2.5) / 3.0, 1e-14);
  EXPECT_TRUE(std::isnan(plateau_spread(h, 1.0, 2.0)));
  EXPECT_TRUE(std::isnan(plateau_spread({}, 1.0, 0.5)));
}

TEST(EstimatorConfig, DefaultsAndProblems) {
  EstimatorConfig c;
  EXPECT_EQ(c.epsilon, 1e-12);
  EXPECT_EQ(c.max_updates, 6);
  const auto r = c.resolved(20.0);
  EXPECT_DOUBLE_EQ(r.min_wait, 0.05);
  EXPECT_DOUBLE_EQ(r.plateau_window, 0.25);
  const auto z = c.resolved(0.0);
  EXPECT_EQ(z.min_wait, 1.0);
  EXPECT_EQ(z.plateau_window, 5.0);
  c.min_wait = 0.3;
  EXPECT_EQ(c.resolved(20.0).min_wait, 0.3);
  EXPECT_TRUE(c.problems(0.01).empty());

  EstimatorConfig bad;
  bad.nu0 = -0.1;
  bad.min_wait = 0.001;
  bad.max_updates = -1;
  const auto pr = bad.problems(0.01);
  ASSERT_EQ(pr.size(), 3u);
  EXPECT_NE(pr[0].find("estimator.nu0"), std::string::npos);
  EXPECT_NE(pr[1].find("estimator.min_wait"), std::string::npos);
  EXPECT_NE(pr[2].find("estimator.max_updates"), std::string::npos);

  const auto s = twin_setup(0.05, 20.0);
  EXPECT_THROW(run_estimation(s.pair0, s.p, bad, {}), invalid_parameter);
}

TEST(RunEstimation, ExactInitialGuessStays) {
  const auto s = twin_setup(0.05, 20.0);
  EstimatorConfig cfg;
  cfg.nu0 = 0.05;
  const auto tr = run_estimation(s.pair0, s.p, cfg, until(3.0, 0.05));
  EXPECT_NEAR(tr.final_nu, 0.05, 1e-8 * 0.05);
  for (const auto* u : tr.accepted_updates()) EXPECT_NEAR(u->nu_after, 0.05, 1e-8 * 0.05);
  EXPECT_NEAR(tr.final_state.t, 3.0, 1e-12);
}

TEST(RunEstimation, WithoutNudgingEstimateIsUnchanged) {
  auto s = twin_setup(0.05, 20.0);
  s.p.mu = 0.0;
  EstimatorConfig cfg;
  cfg.nu0 = 0.08;
  const auto tr = run_estimation(s.pair0, s.p, cfg, until(3.0, 0.05));
  EXPECT_GT(tr.final_nu, 0.0);
  EXPECT_EQ(tr.final_nu, 0.08);
  for (const auto* u : tr.accepted_updates()) EXPECT_EQ(u->nu_after, 0.08);
}

TEST(RunEstimation, TwinConverges) {
  const auto s = twin_setup(0.05, 20.0);
  const GridSpec g = s.pair0.u.grid();
  EstimatorConfig cfg;
  cfg.nu0 = 0.1;
  RecordCollector col(make_forcing(s.p.forcing, g), 10);
  int segments = 0;
  EstimationOptions opt = until(6.0, 0.05);
  opt.sink = &col;
  opt.on_segment = [&](int seg) {
    segments = seg;
    col.set_segment(seg);
  };
  const auto tr = run_estimation(s.pair0, s.p, cfg, opt);
  const auto acc = tr.accepted_updates();
  ASSERT_GE(acc.size(), 5u);
  EXPECT_EQ(segments, tr.accepted);
  EXPECT_EQ(tr.beta.size(), acc.size());
  double prev_err = std::abs(cfg.nu0 - 0.05), prev_t = 0.0;
  const auto rc = cfg.resolved(s.p.mu);
  for (const auto* u : acc) {
    const double err = std::abs(u->nu_after - 0.05);
    if (prev_err > 1e-12 * 0.05) {
      EXPECT_LT(err, prev_err) << "update " << u->m;
      EXPECT_LT(u->beta, 1.0);
    }
    EXPECT_GE(u->t - prev_t, rc.min_wait * (1 - 1e-9));
    EXPECT_NEAR(u->t / s.p.dt, std::round(u->t / s.p.dt), 1e-9);
    // post-update error is bounded by the decomposition budget
    EXPECT_LE(err, u->decomposition.budget * (1 + 1e-9) + 1e-15) << "update " << u->m;
    EXPECT_TRUE(u->nondegenerate_true_nu);
    prev_err = err;
    prev_t = u->t;
  }
  EXPECT_LT(std::abs(tr.final_nu - 0.05), 1e-6 * 0.05);
  EXPECT_EQ(tr.final_nu, acc.back()->nu_after);

  const auto& recs = col.records();
  EXPECT_DOUBLE_EQ(recs.front().t, 0.0);
  EXPECT_NEAR(recs.back().t, 6.0, 1e-12);
  EXPECT_EQ(recs.back().segment, tr.accepted);
  for (std::size_t i = 1; i < recs.size(); ++i) {
    EXPECT_GE(recs[i].segment, recs[i - 1].segment);
    EXPECT_GT(recs[i].t, recs[i - 1].t);
  }
}

TEST(RunEstimation, MaxUpdatesZeroNeverUpdates) {
  const auto s = twin_setup(0.05, 20.0);
  EstimatorConfig cfg;
  cfg.nu0 = 0.1;
  cfg.max_updates = 0;
  const auto tr = run_estimation(s.pair0, s.p, cfg, until(2.0));
  EXPECT_TRUE(tr.updates.empty());
  EXPECT_EQ(tr.final_nu, 0.1);
  EXPECT_FALSE(tr.nu_true.has_value());
}
