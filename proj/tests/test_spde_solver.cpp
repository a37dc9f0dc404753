#include <catch_amalgamated.hpp>

#include <cmath>

#include "wavegauge/spde_solver.hpp"

using namespace wavegauge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Setup {
  GridSpec grid;
  ReactionSpec spec;
  WaveProfile wave;
  StabilityConstants consts;

  explicit Setup(double a = 0.5, std::size_t n = 256, double l = 16.0)
      : grid(GridSpec::make(l, n)), spec(make_nagumo(a)), wave(nagumo_profile(WaveParams{1.0, 2.0}, a, grid)),
        consts(compute_constants(wave, spec, weighted_integrals(wave))) {}

  NoiseModel white(double amp) const {
    return build_noise(NoiseKind::white, SigmaKind::nagumo_shape, amp, grid);
  }
};

Field bump(const GridSpec& g, double norm) {
  Field u = Field::sample(g, [](double x) { return std::exp(-x * x); });
  const double s = norm / h_norm(u);
  for (double& v : u.vals) v *= s;
  return u;
}

}  // namespace

TEST_CASE("Wilson interval matches reference values") {
  const WilsonInterval w = wilson95(5, 100);
  CHECK_THAT(w.low, WithinAbs(0.021543679154368, 1e-12));
  CHECK_THAT(w.high, WithinAbs(0.111750469231919, 1e-12));
  const WilsonInterval z = wilson95(0, 50);
  CHECK(z.low == 0.0);
  CHECK_THAT(z.high, WithinAbs(0.0713475991333587, 1e-12));
  const WilsonInterval f = wilson95(50, 50);
  CHECK_THAT(f.low, WithinAbs(0.928652400866641, 1e-12));
  CHECK(f.high == 1.0);
}

TEST_CASE("moment sampling times are geometric and end at the horizon") {
  const auto s = moment_steps(10.0, 0.01, 8);
  REQUIRE(s.size() == 8);
  CHECK(s.back() == 1000);
  CHECK(s.front() == 8);
  for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] > s[k - 1]);
  CHECK(moment_steps(10.0, 0.01, 0).empty());
  CHECK(moment_steps(10.0, 0.01, 1) == std::vector<std::size_t>{1000});
}

TEST_CASE("zero noise reproduces the deterministic scheme bit for bit") {
  const Setup s;
  const NoiseModel zero = s.white(0.0);
  const double dt = 0.01;
  Field u1 = bump(s.grid, 0.01), u2 = u1;
  PhaseState p1{0.0, s.consts.C_star}, p2 = p1;
  Stepper a(s.wave, s.spec, dt), b(s.wave, s.spec, dt);
  const NoiseStream rng(5);
  for (std::uint64_t k = 1; k <= 300; ++k) {
    spde_step(a, u1, p1, zero, rng, k);
    b.step(u2, p2);
  }
  for (std::size_t i = 0; i < s.grid.n; ++i) CHECK(u1[i] == u2[i]);
  CHECK(p1.c_shift == p2.c_shift);

  SpdeConfig cfg;
  cfg.dt = dt;
  cfg.t_max = 5.0;
  cfg.record_every = 50;
  const TrialResult tr = run_trial(bump(s.grid, 0.01), cfg, s.consts, s.wave, s.spec, zero, 1);
  DetConfig dc;
  dc.dt = dt;
  dc.t_end = 5.0;
  dc.record_every = 50;
  const TrajectoryRecord rec = run_deterministic(bump(s.grid, 0.01), dc, s.consts, s.wave, s.spec);
  REQUIRE(tr.path_norms.size() == rec.h_norms.size());
  for (std::size_t k = 0; k < rec.h_norms.size(); ++k) {
    CHECK(tr.path_norms[k] == rec.h_norms[k]);
    CHECK(tr.path_phases[k] == rec.phases[k]);
  }
  CHECK_FALSE(tr.exited);
}

TEST_CASE("one noisy step from rest perturbs the front") {
  const Setup s;
  Field u(s.grid);
  PhaseState st{0.0, s.consts.C_star};
  Stepper stepper(s.wave, s.spec, 0.01);
  spde_step(stepper, u, st, s.white(0.01), NoiseStream(2), 1);
  CHECK(h_norm(u) > 0.0);
}

TEST_CASE("Euler-Maruyama refinement with coupled increments") {
  const Setup s(0.25, 256, 16.0);
  const NoiseModel model = s.white(0.05);
  const double t_end = 1.0, dt_ref = 1.0 / 256.0;
  // fine increments drive every resolution; coarse steps sum them
  auto run = [&](std::size_t stride, std::uint64_t seed) {
    const double dt = dt_ref * static_cast<double>(stride);
    const NoiseStream rng(seed);
    Stepper stepper(s.wave, s.spec, dt);
    Field u = bump(s.grid, 0.005);
    PhaseState st{0.0, s.consts.C_star};
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    for (std::size_t k = 0; k < steps; ++k) {
      Field dw(s.grid);
      for (std::size_t j = 0; j < stride; ++j) {
        const Field inc = sample_increment(model, rng, k * stride + j, dt_ref);
        for (std::size_t i = 0; i < dw.size(); ++i) dw[i] += inc[i];
      }
      stepper.step(u, st, [&](std::span<const double> uu, std::span<const double> vt, std::span<double> rhs) {
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += model.amp * model.sigma(uu[i] + vt[i]) * dw[i];
      });
    }
    return u;
  };
  double e8 = 0.0, e4 = 0.0, e2 = 0.0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Field ref = run(1, seed);
    auto err = [&](std::size_t stride) {
      const Field u = run(stride, seed);
      Field d(s.grid);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = u[i] - ref[i];
      return h_norm(d);
    };
    e8 += err(16);
    e4 += err(8);
    e2 += err(4);
  }
  INFO("errors " << e8 << " " << e4 << " " << e2);
  CHECK(e8 / e4 >= 0.9 * std::sqrt(2.0));
  CHECK(e4 / e2 >= 0.9 * std::sqrt(2.0));
}

TEST_CASE("trials without noise never exit and seeds reproduce") {
  const Setup s;
  SpdeConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 20.0;
  const Field u0 = bump(s.grid, 0.5 * s.consts.c_star);
  const TrialResult r = run_trial(u0, cfg, s.consts, s.wave, s.spec, s.white(0.0), 1);
  CHECK_FALSE(r.exited);
  CHECK_FALSE(r.t_exit.has_value());
  CHECK(r.sample_sq_norms.size() == cfg.moment_samples);

  const NoiseModel noisy = s.white(0.05);
  const TrialResult x = run_trial(u0, cfg, s.consts, s.wave, s.spec, noisy, 77);
  const TrialResult y = run_trial(u0, cfg, s.consts, s.wave, s.spec, noisy, 77);
  CHECK(x.exited == y.exited);
  CHECK(x.t_exit == y.t_exit);
  CHECK(x.sample_sq_norms == y.sample_sq_norms);

  CHECK_THROWS_AS(run_trial(bump(s.grid, 2.0 * s.consts.c_star), cfg, s.consts, s.wave, s.spec, noisy, 1),
                  DomainError);
}

TEST_CASE("huge noise exits within a few steps") {
  const Setup s;
  const NoiseModel model = s.white(1.0);
  CHECK(hs_norm_sq(model, Field(s.grid, s.wave.v)) >= 1.0);
  SpdeConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 1.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const TrialResult r = run_trial(Field(s.grid), cfg, s.consts, s.wave, s.spec, model, seed);
    CHECK(r.exited);
    REQUIRE(r.t_exit.has_value());
    CHECK(*r.t_exit <= 5.0 * cfg.dt + 1e-12);
  }
}

TEST_CASE("zero noise and zero data give a zero bound") {
  const Setup s;
  SpdeConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 2.0;
  cfg.trials = 5;
  const ExitStats st = mc_exit(Field(s.grid), cfg, s.consts, s.wave, s.spec, s.white(0.0));
  CHECK(st.exits == 0);
  CHECK(st.p_hat == 0.0);
  CHECK(st.bound == 0.0);
  CHECK(st.ci_low == 0.0);
  CHECK(st.hypothesis_ok);
  CHECK(st.certified);
  CHECK(st.moment_ok);
}

TEST_CASE("bound for the stationary front with a fixed HS norm") {
  const Setup s;
  NoiseModel model = s.white(1.0);
  model.amp = amplitude_for_hs(model, Field(s.grid, s.wave.v), 1e-6);
  model = build_noise(NoiseKind::white, SigmaKind::nagumo_shape, model.amp, s.grid);
  SpdeConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 2.0;
  cfg.trials = 4;
  const ExitStats st = mc_exit(Field(s.grid), cfg, s.consts, s.wave, s.spec, model);
  CHECK_THAT(st.hs_sq, WithinRel(1e-6, 1e-12));
  CHECK_THAT(st.bound, WithinRel(48.0 * 48.0 * 16.0 * 1e-6, 2e-3));
  CHECK(st.hypothesis_ok);
}

TEST_CASE("constant dispersion is never certified") {
  const Setup s;
  const NoiseModel model = build_noise(NoiseKind::white, SigmaKind::constant, 1e-4, s.grid);
  SpdeConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 0.5;
  cfg.trials = 2;
  const ExitStats st = mc_exit(Field(s.grid), cfg, s.consts, s.wave, s.spec, model);
  CHECK_FALSE(st.hypothesis_ok);
  CHECK_FALSE(st.certified);
}

TEST_CASE("statistics do not depend on the worker count") {
  const Setup s;
  SpdeConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 3.0;
  cfg.trials = 12;
  cfg.seed = 40;
  const NoiseModel model = s.white(0.12);
  const Field u0 = bump(s.grid, 0.005);
  cfg.threads = 1;
  const ExitStats a = mc_exit(u0, cfg, s.consts, s.wave, s.spec, model, true);
  cfg.threads = 3;
  const ExitStats b = mc_exit(u0, cfg, s.consts, s.wave, s.spec, model, true);
  CHECK(a.exits == b.exits);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.moment_mean == b.moment_mean);
  CHECK(a.moment_se == b.moment_se);
  REQUIRE(a.trial_results.size() == b.trial_results.size());
  for (std::size_t i = 0; i < a.trial_results.size(); ++i) {
    CHECK(a.trial_results[i].t_exit == b.trial_results[i].t_exit);
    CHECK(a.trial_results[i].sample_sq_norms == b.trial_results[i].sample_sq_norms);
  }
  CHECK(a.ci_low <= a.p_hat);
  CHECK(a.p_hat <= a.ci_high);
}

TEST_CASE("exit frequency grows with the noise amplitude") {
  const Setup s;
  SpdeConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 5.0;
  cfg.trials = 40;
  cfg.seed = 900;
  std::vector<ExitStats> sweep;
  for (double amp : {0.02, 0.06, 0.15})
    sweep.push_back(mc_exit(Field(s.grid), cfg, s.consts, s.wave, s.spec, s.white(amp)));
  for (std::size_t k = 1; k < sweep.size(); ++k) CHECK(sweep[k - 1].ci_low <= sweep[k].ci_high);
  CHECK(sweep.front().p_hat <= sweep.back().p_hat);
  CHECK(sweep.back().exits > 0);
}

TEST_CASE("invalid Monte Carlo settings are domain errors") {
  const Setup s;
  SpdeConfig cfg;
  cfg.trials = 0;
  CHECK_THROWS_AS(mc_exit(Field(s.grid), cfg, s.consts, s.wave, s.spec, s.white(0.0)), DomainError);
  cfg = SpdeConfig{};
  cfg.dt = -1.0;
  CHECK_THROWS_AS(mc_exit(Field(s.grid), cfg, s.consts, s.wave, s.spec, s.white(0.0)), DomainError);
}
