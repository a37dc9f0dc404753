#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "wavegauge/constants.hpp"

using namespace wavegauge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const WaveParams kParams{1.0, 2.0};
const GridSpec kGrid = GridSpec::make(25.0, 4096);

void require_all(const ValidationReport& rep) {
  for (const auto& c : rep.checks()) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
}

}  // namespace

TEST_CASE("gamma closed forms") {
  const ReactionSpec q = make_nagumo(0.25);
  const Gammas g = gamma_closed_form(q, nagumo_profile(kParams, 0.25, kGrid));
  CHECK_THAT(g.minus, WithinAbs(-0.5, 1e-14));
  CHECK_THAT(g.plus, WithinAbs(1.5, 1e-14));
  CHECK_THAT(g.ratio_left, WithinAbs(g.minus, 0.01));
  CHECK_THAT(g.ratio_right, WithinAbs(g.plus, 0.02));

  const ReactionSpec h = make_nagumo(0.5);
  const Gammas s = gamma_closed_form(h, nagumo_profile(kParams, 0.5, kGrid));
  CHECK_THAT(s.minus, WithinAbs(-1.0, 1e-14));
  CHECK_THAT(s.plus, WithinAbs(1.0, 1e-14));
}

TEST_CASE("kappa equals (b/nu) a (1 - a) for Nagumo") {
  for (double a : {0.1, 0.25, 0.4, 0.5}) {
    INFO("a = " << a);
    const KappaInf k = kappa_inf(nagumo_profile(kParams, a, kGrid), make_nagumo(a));
    CHECK_THAT(k.kappa, WithinAbs(2.0 * a * (1.0 - a), 1e-8));
  }
  const KappaInf k = kappa_inf(nagumo_profile(kParams, 0.25, kGrid), make_nagumo(0.25));
  CHECK_THAT(k.phi_minus_inf, WithinAbs(0.5, 1e-14));
  CHECK(k.phi_plus_inf >= k.kappa);
  // Phi attains its minimum where v = a, i.e. at x = log(a / (1 - a))
  CHECK_THAT(k.x_argmin, WithinAbs(std::log(1.0 / 3.0), 1e-4));
}

TEST_CASE("kappa is stable under grid doubling") {
  for (double a : {0.25, 0.5}) {
    const double k1 = kappa_inf(nagumo_profile(kParams, a, GridSpec::make(25.0, 4096)), make_nagumo(a)).kappa;
    const double k2 = kappa_inf(nagumo_profile(kParams, a, GridSpec::make(25.0, 8192)), make_nagumo(a)).kappa;
    CHECK(std::abs(k1 - k2) <= 1e-8);
  }
  const ReactionSpec s = make_nagumo(0.3);
  const double k1 = kappa_inf(solve_profile(s, kParams, GridSpec::make(25.0, 4096)), s).kappa;
  const double k2 = kappa_inf(solve_profile(s, kParams, GridSpec::make(25.0, 8192)), s).kappa;
  CHECK(std::abs(k1 - k2) <= 1e-8);
}

TEST_CASE("g2 is positive between x0 and x1") {
  const WaveProfile q = nagumo_profile(kParams, 0.25, kGrid);
  require_all(g2_scan(q, make_nagumo(0.25)));

  const WaveProfile h = nagumo_profile(kParams, 0.5, kGrid);
  const ValidationReport rep = g2_scan(h, make_nagumo(0.5));
  CHECK(rep.all_passed());
  CHECK(rep.checks().front().detail == "stationary wave");

  // v = 3/4 on the stationary front sits at x = log 3
  const ProfilePoint p = h.eval(std::log(3.0));
  const ReactionSpec s = make_nagumo(0.5);
  const double g2 = 0.5 * s.df(p.v) * p.vx * p.vx - s.f(p.v) * p.vxx;
  CHECK_THAT(p.v, WithinAbs(0.75, 1e-12));
  CHECK_THAT(g2, WithinAbs(0.5 * 0.0625 * 0.03515625 + 0.046875 * 0.09375, 1e-12));
}

TEST_CASE("weight profile of the a = 1/4 front") {
  const WaveProfile w = nagumo_profile(kParams, 0.25, kGrid);
  const WeightProfile wp = weight_profile(w, 0.375);
  require_all(wp.report);
  CHECK_THAT(wp.beta, WithinAbs(0.25, 1e-15));
  CHECK_THAT(wp.kappa0, WithinAbs(0.4375, 1e-15));
  CHECK_THAT(wp.x_half, WithinAbs(std::log(0.6), 1e-9));

  // theta = 2 (1/2 - v) - 1/4 and theta' = -2 vx on this front
  const std::size_t i = kGrid.nearest(0.0);
  CHECK_THAT(wp.theta[i], WithinAbs(2.0 * (0.5 - w.v[i]) - 0.25, 1e-10));
  CHECK_THAT(wp.dtheta[i], WithinAbs(-2.0 * w.vx[i], 1e-10));
  const ProfilePoint mid = w.eval(0.0);
  const double lhs = 2.0 * mid.vx + std::pow(2.0 * (0.5 - mid.v) - 0.25, 2);
  CHECK_THAT(lhs, WithinAbs(0.5625, 1e-14));
}

TEST_CASE("weight profile of the stationary front is centred") {
  const WaveProfile w = nagumo_profile(kParams, 0.5, kGrid);
  const WeightProfile wp = weight_profile(w, 0.5);
  require_all(wp.report);
  CHECK(wp.beta == 0.0);
  CHECK_THAT(wp.x_half, WithinAbs(0.0, 1e-9));
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(wp.w[i] == w.vx[i]);
}

TEST_CASE("weighted Hardy inequality") {
  for (double a : {0.25, 0.5}) {
    const WaveProfile w = nagumo_profile(kParams, a, kGrid);
    const WeightProfile wp = weight_profile(w, kappa_inf(w, make_nagumo(a)).kappa);

    const InequalityResult z = hardy_verify(wp, wp.kappa0, Field(kGrid));
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);
    CHECK(z.pass);

    const Field lin = Field::sample(kGrid, [&](double x) { return x - wp.x_half; });
    CHECK(hardy_verify(wp, wp.kappa0, lin).pass);

    TestFunctionSource src(kGrid, 7);
    for (int k = 0; k < 100; ++k) {
      const InequalityResult r = hardy_verify(wp, wp.kappa0, src.fourier_vanishing_at(wp.x_half));
      INFO("lhs " << r.lhs << " rhs " << r.rhs);
      CHECK(r.pass);
    }
    CHECK_THROWS_AS(hardy_verify(wp, wp.kappa0, Field::sample(kGrid, [](double) { return 1.0; })),
                    DomainError);
  }
}

TEST_CASE("weighted Poincare inequality") {
  for (double a : {0.25, 0.5}) {
    const WaveProfile w = nagumo_profile(kParams, a, kGrid);
    const WaveIntegrals ints = weighted_integrals(w);
    const WeightProfile wp = weight_profile(w, kappa_inf(w, make_nagumo(a)).kappa);

    const InequalityResult c = poincare_verify(wp, ints.Z, Field::sample(kGrid, [](double) { return 0.7; }));
    CHECK(c.pass);
    CHECK_THAT(c.lhs, WithinRel(c.rhs, 1e-6));
    CHECK_THAT(c.lhs, WithinRel(0.49 * ints.Z, 1e-6));

    CHECK(poincare_verify(wp, ints.Z, Field::sample(kGrid, [](double x) { return x; })).pass);
    TestFunctionSource src(kGrid, 8);
    for (int k = 0; k < 100; ++k) CHECK(poincare_verify(wp, ints.Z, src.fourier()).pass);
  }
}

TEST_CASE("comparison function diagnostics") {
  for (double a : {0.25, 0.4}) {
    INFO("a = " << a);
    const ReactionSpec s = make_nagumo(a);
    const WaveProfile w = nagumo_profile(kParams, a, kGrid);
    const WaveIntegrals ints = weighted_integrals(w);
    const WeightProfile wp = weight_profile(w, kappa_inf(w, s).kappa);
    const ComparisonG g = comparison_g(wp, w, s, ints);
    require_all(g.report);
    CHECK(g.residual <= 1e-6);
    CHECK(g.max_slope_ratio <= 1.0 + 1e-6);
  }
  const ReactionSpec h = make_nagumo(0.5);
  const WaveProfile w = nagumo_profile(kParams, 0.5, kGrid);
  const WaveIntegrals ints = weighted_integrals(w);
  const ComparisonG g = comparison_g(weight_profile(w, 0.5), w, h, ints);
  require_all(g.report);
  for (double v : g.g) CHECK(v == 1.0);
  CHECK_THAT(g.mass, WithinRel(ints.Z, 1e-6));
}

TEST_CASE("quadratic form vanishes on the ground state") {
  for (double a : {0.25, 0.5}) {
    const ReactionSpec s = make_nagumo(a);
    const WaveProfile w = nagumo_profile(kParams, a, kGrid);
    CHECK(std::abs(quadratic_form(w, s, Field(kGrid, w.vx))) <= 1e-6);
    CHECK(quadratic_form(w, s, Field(kGrid)) == 0.0);
  }
}

TEST_CASE("stability constants of the stationary front") {
  const ReactionSpec h = make_nagumo(0.5);
  const WaveProfile w = nagumo_profile(kParams, 0.5, kGrid);
  const StabilityConstants k = compute_constants(w, h, weighted_integrals(w));
  CHECK_THAT(k.kappa, WithinAbs(0.5, 1e-8));
  CHECK_THAT(k.q1, WithinAbs(4.0, 1e-6));
  CHECK_THAT(k.C_prop, WithinAbs(6.0, 1e-4));
  CHECK_THAT(k.q2, WithinAbs(9.0, 1e-4));
  CHECK_THAT(k.kappa_star, WithinAbs(0.25, 1e-8));
  CHECK_THAT(k.C_star, WithinAbs(2.25, 1e-4));
  CHECK_THAT(k.c_star, WithinAbs(1.0 / 48.0, 1e-9));
}

TEST_CASE("stability constants of the a = 1/4 front") {
  // independent high-precision quadrature of the closed-form front
  const ReactionSpec q = make_nagumo(0.25);
  const WaveProfile w = nagumo_profile(kParams, 0.25, kGrid);
  const WaveIntegrals ints = weighted_integrals(w);
  CHECK_THAT(ints.Zhalf, WithinRel(0.173550114771811, 1e-7));
  const StabilityConstants k = compute_constants(w, q, ints);
  CHECK_THAT(k.kappa, WithinAbs(0.375, 1e-8));
  CHECK_THAT(k.kappa_star, WithinRel(18.0 / 95.0, 1e-7));
  CHECK_THAT(k.C_star, WithinRel(2.69694473110780, 1e-6));
  CHECK_THAT(k.c_star, WithinRel(0.0135338345864662, 1e-7));
  CHECK(k.gamma_minus < 0.0);
  CHECK(k.gamma_plus > 0.0);
  CHECK(k.kappa_star < w.params.nu);
}

TEST_CASE("constants respond to nu and b") {
  for (const WaveParams p : {WaveParams{0.5, 2.0}, WaveParams{2.0, 1.0}, WaveParams{1.0, 3.0}}) {
    const ReactionSpec s = make_nagumo(0.3);
    const GridSpec g = GridSpec::make(25.0 * std::sqrt(2.0 * p.nu / p.b), 4096);
    const WaveProfile w = nagumo_profile(p, 0.3, g);
    const StabilityConstants k = compute_constants(w, s, weighted_integrals(w));
    const double beta = w.c / (2.0 * p.nu);
    CHECK_THAT(k.kappa, WithinRel(p.b / p.nu * 0.3 * 0.7, 1e-7));
    CHECK_THAT(k.kappa_star, WithinRel(k.kappa / (k.kappa + beta * beta) * p.nu / k.q1, 1e-14));
    CHECK(k.kappa_star > 0.0);
    CHECK(k.kappa_star < p.nu);
    CHECK_THAT(k.c_star, WithinRel(std::min(k.kappa_star / (4.0 * p.b * s.eta2()), 1.0), 1e-14));
  }
}

TEST_CASE("master inequality on random compact fields") {
  for (double a : {0.25, 0.5}) {
    INFO("a = " << a);
    const ReactionSpec s = make_nagumo(a);
    const WaveProfile w = nagumo_profile(kParams, a, kGrid);
    const StabilityConstants k = compute_constants(w, s, weighted_integrals(w));
    TestFunctionSource src(kGrid, 99);
    for (int n = 0; n < 200; ++n) {
      const InequalityResult r = master_inequality(w, s, k, src.compact());
      INFO("lhs " << r.lhs << " rhs " << r.rhs);
      CHECK(r.pass);
    }
    const Field bump = Field::sample(kGrid, [](double x) { return std::exp(-x * x); });
    CHECK(master_inequality(w, s, k, bump).pass);
  }
}

TEST_CASE("monotonicity and coercivity of the full drift") {
  const GridSpec g = GridSpec::make(12.0, 1024);
  const Tolerance tol;
  for (double a : {0.25, 0.5}) {
    const ReactionSpec s = make_nagumo(a);
    const double nu = kParams.nu, b = kParams.b;
    auto drift = [&](const Field& u) {
      Field out = apply_laplacian(u, Boundary::dirichlet);
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = nu * out[i] + b * s.f(u[i]);
      return out;
    };
    TestFunctionSource src(g, 3);
    for (int n = 0; n < 100; ++n) {
      Field u1 = src.compact(0.5), u2 = src.compact(0.5);
      for (double& v : u1.vals) v *= 2.0;
      Field d1 = drift(u1), d2 = drift(u2), diff(g), ddiff(g);
      for (std::size_t i = 0; i < g.n; ++i) {
        diff[i] = u1[i] - u2[i];
        ddiff[i] = d1[i] - d2[i];
      }
      const double h2 = inner(diff, diff);
      CHECK(tol.leq(inner(ddiff, diff), b * s.eta1() * h2));

      const Norms nr = norms(u1);
      CHECK(tol.leq(inner(d1, u1), -nu * nr.v * nr.v + (nu + b * s.eta1()) * nr.h * nr.h));
    }
  }
}
