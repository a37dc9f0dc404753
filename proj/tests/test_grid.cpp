#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "wavegauge/grid.hpp"
#include "wavegauge/wave.hpp"

using namespace wavegauge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("grid spec rejects bad sizes") {
  CHECK_THROWS_AS(GridSpec::make(10.0, 15), DomainError);
  CHECK_THROWS_AS(GridSpec::make(10.0, 100), DomainError);
  CHECK_THROWS_AS(GridSpec::make(0.0, 64), DomainError);
  const GridSpec g = GridSpec::make(10.0, 64);
  CHECK_THAT(g.dx(), WithinRel(20.0 / 63.0, 1e-15));
  CHECK(g.x(0) == -10.0);
  CHECK_THAT(g.x(63), WithinAbs(10.0, 1e-12));
  CHECK(g.nearest(-100.0) == 0);
  CHECK(g.nearest(100.0) == 63);
}

TEST_CASE("laplacian of x^2 is 2 at interior nodes") {
  const GridSpec g = GridSpec::make(4.0, 64);
  const Field f = Field::sample(g, [](double x) { return x * x; });
  const Field lap = apply_laplacian(f, Boundary::dirichlet);
  for (std::size_t i = 1; i + 1 < g.n; ++i) CHECK_THAT(lap[i], WithinAbs(2.0, 1e-9));
  const Field zero = apply_laplacian(Field(g), Boundary::neumann);
  for (double v : zero.vals) CHECK(v == 0.0);
}

TEST_CASE("laplacian converges at second order on a sine") {
  auto max_err = [](std::size_t n) {
    const double l = 5.0;
    const GridSpec g = GridSpec::make(l, n);
    const double k = std::numbers::pi / l;
    const Field f = Field::sample(g, [&](double x) { return std::sin(k * x); });
    const Field lap = apply_laplacian(f, Boundary::dirichlet);
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) e = std::max(e, std::abs(lap[i] + k * k * f[i]));
    return e;
  };
  const double ratio = max_err(256) / max_err(512);
  CHECK(ratio > 3.8);
  CHECK(ratio < 4.2);
}

TEST_CASE("unknown boundary tag is rejected") {
  CHECK(parse_boundary("dirichlet") == Boundary::dirichlet);
  CHECK_THROWS_AS(parse_boundary("periodic"), DomainError);
}

TEST_CASE("trapezoid calibration against sqrt(pi)") {
  const GridSpec g = GridSpec::make(8.0, 4096);
  const Field f = Field::sample(g, [](double x) { return std::exp(-x * x); });
  CHECK_THAT(trapezoid(f.span(), g.dx()), WithinAbs(std::sqrt(std::numbers::pi), 1e-10));
}

TEST_CASE("norms of zero and of a normalised bump") {
  const GridSpec g = GridSpec::make(10.0, 1024);
  const Norms z = norms(Field(g));
  CHECK(z.h == 0.0);
  CHECK(z.v == 0.0);
  CHECK(z.sup == 0.0);
  Field bump = Field::sample(g, [](double x) { return std::abs(x) < 2.0 ? std::exp(-1.0 / (4.0 - x * x)) : 0.0; });
  const double s = 1.0 / h_norm(bump);
  for (double& v : bump.vals) v *= s;
  CHECK_THAT(h_norm(bump), WithinAbs(1.0, 1e-10));
}

TEST_CASE("discrete Sobolev embedding sup <= V-norm on smooth fields") {
  const GridSpec g = GridSpec::make(10.0, 1024);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-3.0, 3.0), s(0.3, 3.0);
  for (int k = 0; k < 50; ++k) {
    const double x0 = c(rng), width = s(rng), amp = c(rng);
    const Field f = Field::sample(g, [&](double x) {
      const double z = (x - x0) / width;
      return amp * std::exp(-z * z) * std::cos(x);
    });
    const Norms nr = norms(f);
    CHECK(nr.sup <= nr.v * (1.0 + 1e-6));
  }
}

TEST_CASE("inner product identities") {
  const GridSpec g = GridSpec::make(10.0, 1024);
  const Field even = Field::sample(g, [](double x) { return std::exp(-x * x); });
  const Field odd = Field::sample(g, [](double x) { return x * std::exp(-x * x); });
  CHECK_THAT(inner(even, even), WithinRel(h_norm(even) * h_norm(even), 1e-14));
  CHECK_THAT(inner(even, odd), WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(inner(even, Field(GridSpec::make(10.0, 512))), DomainError);

  const GridSpec g2 = GridSpec::make(25.0, 4096);
  const WaveProfile w = nagumo_profile(WaveParams{1.0, 2.0}, 0.5, g2);
  const Field vx(g2, w.vx);
  CHECK_THAT(inner(vx, vx), WithinAbs(1.0 / 6.0, 1e-6));
}

TEST_CASE("laplacian is self-adjoint and nonpositive on Dirichlet fields") {
  const GridSpec g = GridSpec::make(6.0, 512);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double a1 = u(rng), a2 = u(rng), b1 = u(rng), b2 = u(rng);
    const Field f = Field::sample(g, [&](double x) { return (a1 * std::sin(x) + a2) * std::exp(-x * x / 2.0); });
    const Field h = Field::sample(g, [&](double x) { return (b1 * std::cos(2 * x) + b2 * x) * std::exp(-x * x / 3.0); });
    const double lhs = inner(apply_laplacian(f, Boundary::dirichlet), h);
    const double rhs = inner(f, apply_laplacian(h, Boundary::dirichlet));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * h_norm(f) * h_norm(h));
    CHECK(inner(apply_laplacian(f, Boundary::dirichlet), f) <= 0.0);
  }
}

TEST_CASE("tridiagonal solver inverts the implicit diffusion matrix") {
  const GridSpec g = GridSpec::make(5.0, 128);
  const double nu = 1.3, dt = 0.01;
  const TridiagonalSolver s = implicit_diffusion(g, nu, dt);
  const Field u = Field::sample(g, [](double x) { return std::exp(-x * x) * (1.0 + 0.3 * x); });
  const Field lap = apply_laplacian(u, Boundary::dirichlet);
  std::vector<double> rhs(g.n);
  for (std::size_t i = 0; i < g.n; ++i) rhs[i] = u[i] - dt * nu * lap[i];
  s.solve(rhs);
  for (std::size_t i = 0; i < g.n; ++i) CHECK_THAT(rhs[i], WithinAbs(u[i], 1e-12));
  CHECK_THROWS_AS(TridiagonalSolver({0.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}), NumericalError);
}

TEST_CASE("derivative and interpolation") {
  const GridSpec g = GridSpec::make(2.0, 256);
  const Field f = Field::sample(g, [](double x) { return x * x * x; });
  const auto d = derivative(f.span(), g.dx());
  for (std::size_t i = 0; i < g.n; ++i) CHECK_THAT(d[i], WithinAbs(3.0 * g.x(i) * g.x(i), 1e-3));
  const Field lin = Field::sample(g, [](double x) { return 2.0 * x + 1.0; });
  CHECK_THAT(interpolate_linear(lin, 0.123), WithinAbs(1.246, 1e-12));
  CHECK(interpolate_linear(lin, -10.0) == lin[0]);
}
