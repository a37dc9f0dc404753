#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "wavegauge/core.hpp"
#include "wavegauge/grid.hpp"
#include "wavegauge/reaction.hpp"
#include "wavegauge/wave.hpp"

namespace wavegauge {

struct Gammas {
  double minus = 0.0;
  double plus = 0.0;
  double ratio_left = 0.0;   // ratio at the first grid node
  double ratio_right = 0.0;  // ratio at the last grid node
};

/// Infimum and supremum of (b/nu) f(v)/vx, i.e. the roots of
/// g^2 - (c/nu) g + (b/nu) f'(0 or 1) = 0, with the boundary ratios alongside.
inline Gammas gamma_closed_form(const ReactionSpec& spec, const WaveProfile& w) {
  const double beta = w.c / (2.0 * w.params.nu);
  const double bn = w.params.b / w.params.nu;
  Gammas g;
  g.minus = beta - std::sqrt(beta * beta - bn * spec.df(0.0));
  g.plus = beta + std::sqrt(beta * beta - bn * spec.df(1.0));
  g.ratio_left = w.ratio(0);
  g.ratio_right = w.ratio(w.size() - 1);
  return g;
}

struct KappaInf {
  double kappa = 0.0;
  double grid_min = 0.0;
  double x_argmin = 0.0;
  double phi_minus_inf = 0.0;
  double phi_plus_inf = 0.0;
};

/// Phi = (b/nu) f'(v) + 2 R (R - c/nu) with R = (b/nu) f(v)/vx.
inline double phi_at(const WaveProfile& w, const ProfilePoint& p) {
  const double bn = w.params.b / w.params.nu;
  const double cn = w.c / w.params.nu;
  const double r = w.ratio_of(p);
  if (p.vx < 1e-300) {
    const double fp = p.v < 0.5 ? w.spec.df(0.0) : w.spec.df(1.0);
    return bn * fp + 2.0 * r * (r - cn);
  }
  return bn * w.slope_at(p.v, p.vc) + 2.0 * r * (r - cn);
}

/// kappa: grid minimum of Phi refined by Brent's method between the
/// neighbouring nodes, compared against the two limits at +-infinity.
inline KappaInf kappa_inf(const WaveProfile& w, const ReactionSpec& spec) {
  const double bn = w.params.b / w.params.nu;
  const double cn = w.c / w.params.nu;
  const Gammas g = gamma_closed_form(spec, w);
  KappaInf out;
  out.phi_minus_inf = bn * spec.df(0.0) + 2.0 * g.minus * (g.minus - cn);
  out.phi_plus_inf = bn * spec.df(1.0) + 2.0 * g.plus * (g.plus - cn);

  const std::size_t n = w.size();
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = phi_at(w, w.node(i));
    if (!std::isfinite(phi)) throw NumericalError("kappa_inf: non-finite Phi at a grid node");
    if (phi < best_val) {
      best_val = phi;
      best = i;
    }
  }
  out.grid_min = best_val;
  out.x_argmin = w.x[best];
  double refined = best_val;
  if (best > 0 && best + 1 < n) {
    auto r = boost::math::tools::brent_find_minima(
        [&](double xq) { return phi_at(w, w.eval(xq)); }, w.x[best - 1], w.x[best + 1], 52);
    if (r.second < refined) {
      refined = r.second;
      out.x_argmin = r.first;
    }
  }
  out.kappa = std::min({refined, out.phi_minus_inf, out.phi_plus_inf});
  if (!(out.kappa > 0.0))
    throw NumericalError("kappa_inf: non-positive infimum " + format_number(out.kappa));
  return out;
}

/// g2 = f'(v) vx^2 / 2 - f(v) vxx must be positive between x0 and x1.
inline ValidationReport g2_scan(const WaveProfile& w, const ReactionSpec& spec) {
  (void)spec;
  ValidationReport rep;
  Check c{"g2 > 0 on [x0, x1]", true, std::nullopt, {}};
  if (w.c <= 0.0) {
    c.detail = "stationary wave";
    rep.add(std::move(c));
    return rep;
  }
  const double x0 = w.landmarks.x0, x1 = w.landmarks.x1;
  std::size_t count = 0;
  double g2_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.x[i] < x0 || w.x[i] > x1) continue;
    ++count;
    const double g2 = 0.5 * w.slope_at(w.v[i], w.vc[i]) * w.vx[i] * w.vx[i] -
                      w.reaction_at(w.v[i], w.vc[i]) * w.vxx[i];
    g2_min = std::min(g2_min, g2);
    if (!(g2 > 0.0) && c.passed) {
      c.passed = false;
      c.witness = w.x[i];
    }
  }
  c.detail = std::to_string(count) + " nodes, min g2 = " + format_number(g2_min);
  rep.add(std::move(c));
  return rep;
}

struct WeightProfile {
  GridSpec grid;
  std::vector<double> x;
  std::vector<double> w;       // e^{-(c/2nu) x} vx
  std::vector<double> theta;   // w_x / w
  std::vector<double> dtheta;  // theta'
  double beta = 0.0;           // c / (2 nu)
  double kappa = 0.0;
  double kappa0 = 0.0;         // kappa + beta^2
  double x_half = 0.0;         // root of theta
  ValidationReport report;
};

/// Weight w = e^{-(c/2nu)x} vx with theta = w_x/w = beta - R and
/// theta' = -R' = -((b/nu) f'(v) - R (c/nu - R)), so -theta' + theta^2 = Phi + beta^2.
inline WeightProfile weight_profile(const WaveProfile& wave, double kappa,
                                    const Tolerance& tol = {}) {
  const std::size_t n = wave.size();
  const double bn = wave.params.b / wave.params.nu;
  const double cn = wave.c / wave.params.nu;
  WeightProfile wp;
  wp.grid = wave.grid;
  wp.x = wave.x;
  wp.beta = 0.5 * cn;
  wp.kappa = kappa;
  wp.kappa0 = kappa + wp.beta * wp.beta;
  wp.w.resize(n);
  wp.theta.resize(n);
  wp.dtheta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    wp.w[i] = std::exp(-wp.beta * wave.x[i]) * wave.vx[i];
    const double r = wave.ratio(i);
    const double fp = wave.vx[i] < 1e-300 ? (wave.v[i] < 0.5 ? wave.spec.df(0.0) : wave.spec.df(1.0))
                                          : wave.slope_at(wave.v[i], wave.vc[i]);
    wp.theta[i] = wp.beta - r;
    wp.dtheta[i] = -(bn * fp - r * (cn - r));
  }
  wp.x_half = wave.landmarks.x_alpha.count(0.5) ? wave.landmarks.x_alpha.at(0.5)
                                               : find_landmarks(wave, wave.spec, {0.5}).x_alpha.at(0.5);

  Check pos{"w > 0", true, std::nullopt, {}};
  Check ineq{"-theta' + theta^2 >= kappa + beta^2", true, std::nullopt, {}};
  Check dec{"theta decreasing", true, std::nullopt, {}};
  for (std::size_t i = 0; i < n; ++i) {
    if (!(wp.w[i] > 0.0) && pos.passed) {
      pos.passed = false;
      pos.witness = wp.x[i];
    }
    const double lhs = -wp.dtheta[i] + wp.theta[i] * wp.theta[i];
    if (!tol.leq(wp.kappa0, lhs) && ineq.passed) {
      ineq.passed = false;
      ineq.witness = wp.x[i];
    }
    if (i > 0 && wp.theta[i] > wp.theta[i - 1] + 1e-12 * (1.0 + std::abs(wp.theta[i - 1])) &&
        dec.passed) {
      dec.passed = false;
      dec.witness = wp.x[i];
    }
  }
  // theta at x_half through the continuous profile
  const double th_half = wp.beta - wave.ratio_at(wp.x_half);
  wp.report.add(std::move(pos));
  wp.report.add(std::move(ineq));
  wp.report.add(std::move(dec));
  wp.report.add("theta(x_0.5) = 0", std::abs(th_half) <= 1e-8, wp.x_half,
                "theta=" + format_number(th_half));
  return wp;
}

struct InequalityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

namespace detail {

inline double weighted_sq(std::span<const double> h, std::span<const double> w, double dx) {
  std::vector<double> g(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) g[i] = h[i] * h[i] * w[i] * w[i];
  return trapezoid(g, dx);
}

}  // namespace detail

/// int h^2 w^2 <= (1/kappa0) int h_x^2 w^2 for h vanishing at x_0.5.
inline InequalityResult hardy_verify(const WeightProfile& wp, double kappa0, const Field& h,
                                     double rel_tol = 1e-6) {
  if (!(h.grid == wp.grid)) throw DomainError("hardy_verify: grid mismatch");
  double scale = 0.0;
  for (double v : h.vals) scale = std::max(scale, std::abs(v));
  const double at_root = interpolate_linear(h, wp.x_half);
  if (std::abs(at_root) > 1e-12 * std::max(scale, 1.0))
    throw DomainError("hardy_verify: test function does not vanish at x_0.5");
  const double dx = wp.grid.dx();
  const auto hx = derivative(h.span(), dx);
  InequalityResult r;
  r.lhs = detail::weighted_sq(h.span(), wp.w, dx);
  r.rhs = detail::weighted_sq(hx, wp.w, dx) / kappa0;
  r.pass = r.lhs <= r.rhs * (1.0 + rel_tol);
  return r;
}

/// int h^2 w^2 <= (1/kappa0) int h_x^2 w^2 + Z^{-1} (int h w^2)^2.
inline InequalityResult poincare_verify(const WeightProfile& wp, double Z, const Field& h,
                                        const Tolerance& tol = {}) {
  if (!(h.grid == wp.grid)) throw DomainError("poincare_verify: grid mismatch");
  const double dx = wp.grid.dx();
  const auto hx = derivative(h.span(), dx);
  std::vector<double> hw(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) hw[i] = h[i] * wp.w[i] * wp.w[i];
  const double mean = trapezoid(hw, dx);
  InequalityResult r;
  r.lhs = detail::weighted_sq(h.span(), wp.w, dx);
  r.rhs = detail::weighted_sq(hx, wp.w, dx) / wp.kappa0 + mean * mean / Z;
  r.pass = tol.leq(r.lhs, r.rhs);
  return r;
}

struct ComparisonG {
  std::vector<double> g;
  std::vector<double> gx;
  double residual = 0.0;  // max |discrete residual| / max |rhs|
  double mass = 0.0;      // int g^2 w^2
  double mass_bound = 0.0;
  double max_slope_ratio = 0.0;  // max |g_x| / (beta g)
  ValidationReport report;
};

/// Solves kappa0 g - g_xx - (c/nu - R) g_x = kappa0 e^{beta x} by central
/// differences on the profile grid and on its two-fold refinement, then
/// combines both by Richardson extrapolation to fourth order. The far field is
/// closed with Robin conditions taken from the constant-coefficient problems
/// at +-infinity: there g = A e^{beta x} plus the decaying homogeneous mode,
/// and the boundary rows impose exactly that.
inline ComparisonG comparison_g(const WeightProfile& wp, const WaveProfile& w,
                                const ReactionSpec& spec, const WaveIntegrals& ints,
                                const Tolerance& tol = {}) {
  const std::size_t n = w.size();
  const double dx = w.grid.dx();
  const double beta = wp.beta;
  const double k0 = wp.kappa0;
  const double cn = w.c / w.params.nu;
  ComparisonG out;
  out.g.assign(n, 1.0);
  out.gx.assign(n, 0.0);

  if (w.c > 0.0) {
    const Gammas gam = gamma_closed_form(spec, w);
    const double d_minus = cn - gam.minus;
    const double d_plus = cn - gam.plus;
    auto roots = [&](double d) {
      const double s = std::sqrt(d * d + 4.0 * k0);
      return std::pair{(-d - s) / 2.0, (-d + s) / 2.0};
    };
    const double r_left = roots(d_minus).second;  // growing mode, decays towards -inf
    const double r_right = roots(d_plus).first;   // decaying mode towards +inf
    const double a_minus = k0 / (k0 - beta * beta - d_minus * beta);
    const double a_plus = k0 / (k0 - beta * beta - d_plus * beta);
    const double x_lo = w.x.front(), x_hi = w.x.back();
    const double s_left = a_minus * (beta - r_left) * std::exp(beta * x_lo);
    const double s_right = a_plus * (beta - r_right) * std::exp(beta * x_hi);

    // returns g, g_x and the relative algebraic residual on m uniform nodes
    auto solve_on = [&](std::size_t m, const std::vector<double>& drift) {
      const double h = (x_hi - x_lo) / static_cast<double>(m - 1);
      std::vector<double> lower(m), diag(m), upper(m), rhs(m);
      const double inv2 = 1.0 / (h * h);
      for (std::size_t i = 0; i < m; ++i) {
        const double xi = x_lo + h * static_cast<double>(i);
        lower[i] = -inv2 + drift[i] / (2.0 * h);
        diag[i] = k0 + 2.0 * inv2;
        upper[i] = -inv2 - drift[i] / (2.0 * h);
        rhs[i] = k0 * std::exp(beta * xi);
      }
      // ghost elimination with g' = r g + s at each end
      diag[0] += lower[0] * (-2.0 * h * r_left);
      upper[0] += lower[0];
      rhs[0] -= lower[0] * (-2.0 * h * s_left);
      lower[0] = 0.0;
      diag[m - 1] += upper[m - 1] * (2.0 * h * r_right);
      lower[m - 1] += upper[m - 1];
      rhs[m - 1] -= upper[m - 1] * (2.0 * h * s_right);
      upper[m - 1] = 0.0;

      std::vector<double> g = rhs;
      TridiagonalSolver(lower, diag, upper).solve(g);
      double res = 0.0, rhs_max = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double lhs = diag[i] * g[i];
        if (i > 0) lhs += lower[i] * g[i - 1];
        if (i + 1 < m) lhs += upper[i] * g[i + 1];
        res = std::max(res, std::abs(lhs - rhs[i]));
        rhs_max = std::max(rhs_max, std::abs(rhs[i]));
      }
      std::vector<double> gx(m);
      for (std::size_t i = 1; i + 1 < m; ++i) gx[i] = (g[i + 1] - g[i - 1]) / (2.0 * h);
      gx[0] = r_left * g[0] + s_left;
      gx[m - 1] = r_right * g[m - 1] + s_right;
      return std::tuple{std::move(g), std::move(gx), res / rhs_max};
    };

    std::vector<double> drift(n), drift_fine(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) drift[i] = cn - w.ratio(i);
    for (std::size_t i = 0; i < 2 * n - 1; ++i)
      drift_fine[i] = i % 2 == 0 ? drift[i / 2] : cn - w.ratio_at(x_lo + 0.5 * dx * static_cast<double>(i));
    auto [g_c, gx_c, res_c] = solve_on(n, drift);
    auto [g_f, gx_f, res_f] = solve_on(2 * n - 1, drift_fine);
    for (std::size_t i = 0; i < n; ++i) {
      out.g[i] = (4.0 * g_f[2 * i] - g_c[i]) / 3.0;
      out.gx[i] = (4.0 * gx_f[2 * i] - gx_c[i]) / 3.0;
    }
    out.residual = std::max(res_c, res_f);
  }

  Check pos{"g > 0", true, std::nullopt, {}};
  Check slope{"|g_x| <= (c/2nu) g", true, std::nullopt, {}};
  for (std::size_t i = 0; i < n; ++i) {
    if (!(out.g[i] > 0.0) && pos.passed) {
      pos.passed = false;
      pos.witness = w.x[i];
    }
    if (!tol.leq(std::abs(out.gx[i]), beta * out.g[i]) && slope.passed) {
      slope.passed = false;
      slope.witness = w.x[i];
    }
    if (beta > 0.0)
      out.max_slope_ratio = std::max(out.max_slope_ratio, std::abs(out.gx[i]) / (beta * out.g[i]));
  }
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = out.g[i] * out.g[i] * wp.w[i] * wp.w[i];
  out.mass = trapezoid(m, dx);
  out.mass_bound = ints.Zhalf * ints.Zhalf / ints.Z;
  slope.detail = "max ratio " + format_number(out.max_slope_ratio);
  out.report.add(std::move(pos));
  out.report.add(std::move(slope));
  out.report.add("int g^2 w^2 >= Zhalf^2/Z", tol.leq(out.mass_bound, out.mass), std::nullopt,
                 "mass=" + format_number(out.mass) + " bound=" + format_number(out.mass_bound));
  out.report.add("linear solve residual <= 1e-6", out.residual <= 1e-6, std::nullopt,
                 "residual=" + format_number(out.residual));
  return out;
}

/// -nu int u_x^2 + b int f'(v) u^2 on the grid.
inline double quadratic_form(const WaveProfile& w, const ReactionSpec& spec, const Field& u) {
  (void)spec;
  const double dx = w.grid.dx();
  std::vector<double> q(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) q[i] = w.slope_at(w.v[i], w.vc[i]) * u[i] * u[i];
  return -w.params.nu * gradient_energy(u.span(), dx) + w.params.b * trapezoid(q, dx);
}

struct StabilityConstants {
  double kappa = 0.0;
  double gamma_minus = 0.0;
  double gamma_plus = 0.0;
  double Z = 0.0;
  double Zhalf = 0.0;
  double C_prop = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double kappa_star = 0.0;
  double C_star = 0.0;
  double c_star = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double eta2 = 0.0;
};

inline StabilityConstants compute_constants(const WaveProfile& w, const ReactionSpec& spec,
                                            const WaveIntegrals& ints, double kappa) {
  const double nu = w.params.nu, b = w.params.b;
  const Gammas g = gamma_closed_form(spec, w);
  StabilityConstants k;
  k.kappa = kappa;
  k.gamma_minus = g.minus;
  k.gamma_plus = g.plus;
  k.Z = ints.Z;
  k.Zhalf = ints.Zhalf;
  k.beta = w.c / (2.0 * nu);
  k.eta = spec.eta();
  k.eta2 = spec.eta2();
  const double k0 = kappa + k.beta * k.beta;
  const double zz = ints.Z / (ints.Zhalf * ints.Zhalf);
  const double lin = b * spec.eta() / nu + 1.0;
  k.C_prop = k0 / kappa * zz;
  k.q1 = 1.0 + lin / k0;
  k.q2 = lin * k.C_prop;
  k.kappa_star = kappa / k0 * nu / k.q1;
  k.C_star = k.kappa_star * k.q2 + (nu / kappa) * k.beta * k.beta * k0 * zz;
  k.c_star = std::min(k.kappa_star / (4.0 * b * spec.eta2()), 1.0);
  return k;
}

inline StabilityConstants compute_constants(const WaveProfile& w, const ReactionSpec& spec,
                                            const WaveIntegrals& ints) {
  return compute_constants(w, spec, ints, kappa_inf(w, spec).kappa);
}

/// Smooth random test functions: sums of at most `modes` Fourier modes on the
/// grid's domain with coefficients of magnitude at most 1.
class TestFunctionSource {
 public:
  TestFunctionSource(const GridSpec& g, std::uint64_t seed, std::size_t max_modes = 16)
      : grid_(g), rng_(seed), max_modes_(max_modes) {}

  Field fourier() {
    std::uniform_int_distribution<std::size_t> nm(1, max_modes_);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const std::size_t modes = nm(rng_);
    std::vector<double> ac(modes + 1), bc(modes + 1);
    double norm = 0.0;
    for (std::size_t j = 0; j <= modes; ++j) {
      ac[j] = coef(rng_);
      bc[j] = coef(rng_);
      norm += std::abs(ac[j]) + std::abs(bc[j]);
    }
    const double scale = norm > 1.0 ? 1.0 / norm : 1.0;
    const double base = std::numbers::pi / grid_.l_dom;
    return Field::sample(grid_, [&](double x) {
      double s = 0.0;
      for (std::size_t j = 0; j <= modes; ++j)
        s += ac[j] * std::cos(base * j * x) + bc[j] * std::sin(base * j * x);
      return s * scale;
    });
  }

  /// Fourier sample minus its interpolated value at x_root.
  Field fourier_vanishing_at(double x_root) {
    Field h = fourier();
    const double v0 = interpolate_linear(h, x_root);
    for (double& v : h.vals) v -= v0;
    return h;
  }

  /// Sum of Gaussian bumps times a Fourier factor, negligible beyond |x| = l_dom / 2.
  Field compact(double width_scale = 1.0) {
    std::uniform_int_distribution<int> nb(1, 4);
    std::uniform_real_distribution<double> centre(-0.2 * grid_.l_dom, 0.2 * grid_.l_dom);
    std::uniform_real_distribution<double> width(0.3, 3.0);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    const Field mod = fourier();
    Field u(grid_);
    const int bumps = nb(rng_);
    for (int k = 0; k < bumps; ++k) {
      const double c0 = centre(rng_), s = width(rng_) * width_scale, a0 = amp(rng_);
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double z = (grid_.x(i) - c0) / s;
        u[i] += a0 * std::exp(-0.5 * z * z) * (1.0 + mod[i]);
      }
    }
    return u;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  GridSpec grid_;
  std::mt19937_64 rng_;
  std::size_t max_modes_;
};

/// Master estimate <nu u_xx + b f'(v) u, u> <= -kappa* |u|_V^2 + C* <u, vx>^2.
inline InequalityResult master_inequality(const WaveProfile& w, const ReactionSpec& spec,
                                          const StabilityConstants& k, const Field& u,
                                          const Tolerance& tol = {}) {
  const Field vx(w.grid, w.vx);
  const double proj = inner(u, vx);
  const Norms nr = norms(u);
  InequalityResult r;
  r.lhs = quadratic_form(w, spec, u);
  r.rhs = -k.kappa_star * nr.v * nr.v + k.C_star * proj * proj;
  r.pass = tol.leq(r.lhs, r.rhs);
  return r;
}

}  // namespace wavegauge
