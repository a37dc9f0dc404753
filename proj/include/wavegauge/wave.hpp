#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "wavegauge/core.hpp"
#include "wavegauge/grid.hpp"
#include "wavegauge/reaction.hpp"

namespace wavegauge {

struct WaveParams {
  double nu = 1.0;
  double b = 2.0;

  static WaveParams make(double nu, double b) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("nu must be positive");
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("b must be positive");
    return WaveParams{nu, b};
  }
};

/// Logistic steepness sqrt(b / (2 nu)) of the Nagumo front.
inline double front_steepness(const WaveParams& p) { return std::sqrt(p.b / (2.0 * p.nu)); }

struct ProfilePoint {
  double v = 0.0;
  double vc = 1.0;  // 1 - v, kept separately for accuracy near the upper state
  double vx = 0.0;
  double vxx = 0.0;
};

struct Landmarks {
  std::map<double, double> x_alpha;
  double x0 = 0.0;      // v = a
  double x1 = 0.0;      // vxx = 0
  double x_star = 0.0;  // v = v*
};

struct WaveIntegrals {
  double Z = 0.0;
  double Zhalf = 0.0;
  double norm_vx_sq = 0.0;
  double norm_vxx_sq = 0.0;
};

/// Exponential rates of the fronts' tails: vx ~ e^{left x} as x -> -inf and
/// 1 - v ~ e^{right x} as x -> +inf (left > 0 > right).
struct TailRates {
  double left = 0.0;
  double right = 0.0;
};

inline TailRates tail_rates(const ReactionSpec& spec, const WaveParams& p, double c) {
  const double beta = c / (2.0 * p.nu);
  TailRates t;
  t.left = beta + std::sqrt(beta * beta - p.b / p.nu * spec.df(0.0));
  t.right = beta - std::sqrt(beta * beta - p.b / p.nu * spec.df(1.0));
  return t;
}

namespace detail {

// Quintic Hermite interpolant on [0, h] from value, slope and curvature at both ends.
inline double hermite5(double t, double h, double y0, double d0, double s0, double y1,
                       double d1, double s1) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
  const double h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  const double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double h5 = 0.5 * (t3 - 2.0 * t4 + t5);
  return h0 * y0 + h1 * h * d0 + h2 * h * h * s0 + h3 * y1 + h4 * h * d1 + h5 * h * h * s1;
}

}  // namespace detail

/// Travelling-wave profile sampled on a grid, with continuous evaluation
/// between nodes and exponential tails beyond them. Immutable once built.
class WaveProfile {
 public:
  WaveParams params;
  ReactionSpec spec;
  double c = 0.0;
  GridSpec grid;
  std::vector<double> x, v, vc, vx, vxx;
  TailRates tails;
  std::optional<double> logistic_k;  // set for the closed-form Nagumo front
  Landmarks landmarks;

  [[nodiscard]] std::size_t size() const { return x.size(); }

  /// b f(v) evaluated from whichever of v, 1 - v is more accurate.
  [[nodiscard]] double reaction_at(double vv, double vvc) const {
    return vv <= 0.5 ? spec.f(vv) : spec.f_from_one(vvc);
  }
  [[nodiscard]] double slope_at(double vv, double vvc) const {
    return vv <= 0.5 ? spec.df(vv) : spec.df_from_one(vvc);
  }

  [[nodiscard]] ProfilePoint node(std::size_t i) const { return {v[i], vc[i], vx[i], vxx[i]}; }

  [[nodiscard]] ProfilePoint eval(double xq) const {
    if (logistic_k) return logistic_point(*logistic_k, xq);
    const std::size_t n = x.size();
    if (xq <= x.front()) {
      const double e = std::exp(tails.left * (xq - x.front()));
      return {v.front() * e, 1.0 - v.front() * e, vx.front() * e, vxx.front() * e};
    }
    if (xq >= x.back()) {
      const double e = std::exp(tails.right * (xq - x.back()));
      return {1.0 - vc.back() * e, vc.back() * e, vx.back() * e, vxx.back() * e};
    }
    const double h = grid.dx();
    auto i = static_cast<std::size_t>((xq - x.front()) / h);
    i = std::min(i, n - 2);
    const double t = (xq - x[i]) / h;
    const double d3a = third_derivative(i), d3b = third_derivative(i + 1);
    ProfilePoint out;
    if (v[i] <= 0.5) {
      out.v = detail::hermite5(t, h, v[i], vx[i], vxx[i], v[i + 1], vx[i + 1], vxx[i + 1]);
      out.vc = 1.0 - out.v;
    } else {
      out.vc = detail::hermite5(t, h, vc[i], -vx[i], -vxx[i], vc[i + 1], -vx[i + 1], -vxx[i + 1]);
      out.v = 1.0 - out.vc;
    }
    out.vx = detail::hermite5(t, h, vx[i], vxx[i], d3a, vx[i + 1], vxx[i + 1], d3b);
    out.vxx = (c * out.vx - params.b * reaction_at(out.v, out.vc)) / params.nu;
    return out;
  }

  /// (b/nu) f(v)/vx at a node, with the tail limits once vx underflows.
  [[nodiscard]] double ratio(std::size_t i) const { return ratio_of(node(i)); }
  [[nodiscard]] double ratio_at(double xq) const { return ratio_of(eval(xq)); }

  [[nodiscard]] double ratio_of(const ProfilePoint& p) const {
    const double bn = params.b / params.nu;
    if (p.vx < 1e-300) {
      return p.v < 0.5 ? bn * spec.df(0.0) / tails.left : bn * spec.df(1.0) / tails.right;
    }
    return bn * reaction_at(p.v, p.vc) / p.vx;
  }

  static ProfilePoint logistic_point(double k, double xq) {
    const double t = std::exp(-k * xq);
    ProfilePoint p;
    p.v = 1.0 / (1.0 + t);
    p.vc = 1.0 / (1.0 + 1.0 / t);
    p.vx = k * p.v * p.vc;
    p.vxx = k * k * p.v * p.vc * (p.vc - p.v);
    return p;
  }

 private:
  [[nodiscard]] double third_derivative(std::size_t i) const {
    return (c * vxx[i] - params.b * slope_at(v[i], vc[i]) * vx[i]) / params.nu;
  }
};

/// Samples v(x + C) and v_x(x + C) on the profile's grid for many shifts C.
class ShiftedWave {
 public:
  explicit ShiftedWave(const WaveProfile& w) : w_(&w) {
    if (w.logistic_k) {
      expo_.resize(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) expo_[i] = std::exp(-*w.logistic_k * w.x[i]);
    }
  }

  void sample(double shift, std::span<double> v, std::span<double> vx) const {
    const WaveProfile& w = *w_;
    if (w.logistic_k) {
      const double k = *w.logistic_k;
      const double s = std::exp(-k * shift);
      for (std::size_t i = 0; i < expo_.size(); ++i) {
        const double t = expo_[i] * s;
        const double vv = 1.0 / (1.0 + t);
        const double vvc = 1.0 / (1.0 + 1.0 / t);
        v[i] = vv;
        vx[i] = k * vv * vvc;
      }
      return;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      const ProfilePoint p = w.eval(w.x[i] + shift);
      v[i] = p.v;
      vx[i] = p.vx;
    }
  }

 private:
  const WaveProfile* w_;
  std::vector<double> expo_;
};

inline Landmarks find_landmarks(const WaveProfile& w, const ReactionSpec& spec,
                         const std::vector<double>& alphas);

/// Closed-form Nagumo front with k = sqrt(b/(2 nu)) and c = sqrt(2 nu b)(1/2 - a).
inline WaveProfile nagumo_profile(const WaveParams& params, double a, const GridSpec& grid) {
  if (!(a > 0.0 && a <= 0.5))
    throw DomainError("nagumo_profile: a must lie in (0, 1/2] so that c >= 0, got " +
                      format_number(a));
  const double k = front_steepness(params);
  if (grid.dx() * k > 0.5)
    throw DomainError("nagumo_profile: grid spacing does not resolve the front width 1/k");
  WaveProfile w;
  w.params = params;
  w.spec = make_nagumo(a);
  w.c = std::sqrt(2.0 * params.nu * params.b) * (0.5 - a);
  w.grid = grid;
  w.logistic_k = k;
  w.tails = tail_rates(w.spec, params, w.c);
  w.x = grid.nodes();
  const std::size_t n = grid.n;
  w.v.resize(n);
  w.vc.resize(n);
  w.vx.resize(n);
  w.vxx.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ProfilePoint p = WaveProfile::logistic_point(k, w.x[i]);
    w.v[i] = p.v;
    w.vc[i] = p.vc;
    w.vx[i] = p.vx;
    w.vxx[i] = p.vxx;
  }
  w.landmarks = find_landmarks(w, w.spec, {0.5});
  return w;
}

/// Max over interior nodes of |c vx - nu vxx - b f(v)|.
inline double profile_residual(const WaveProfile& w) {
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    const double res = w.c * w.vx[i] - w.params.nu * w.vxx[i] - w.params.b * w.spec.f(w.v[i]);
    r = std::max(r, std::abs(res));
  }
  return r;
}

namespace detail {

// One half of the heteroclinic orbit, integrated in x from a saddle towards v = a.
// For the left half y = v; for the right half y = 1 - v and the independent
// variable runs backwards (s = -x).
struct Branch {
  std::vector<double> s, y, p;
  double p_match = 0.0;
  double s_match = 0.0;
  bool reached = false;
};

struct ShootingSystem {
  const ReactionSpec* spec;
  double nu, b, c;
  bool upper;  // integrating from v = 1 backwards

  [[nodiscard]] double f(double y) const { return upper ? spec->f_from_one(y) : spec->f(y); }
  [[nodiscard]] double df(double y) const { return upper ? spec->df_from_one(y) : spec->df(y); }

  // d/ds of (y, p)
  [[nodiscard]] std::array<double, 2> rhs(double y, double p) const {
    if (upper) return {p, (b * f(y) - c * p) / nu};
    return {p, (c * p - b * f(y)) / nu};
  }
  // second s-derivative of p
  [[nodiscard]] double p2(double y, double p) const {
    const double p1 = rhs(y, p)[1];
    if (upper) return (-b * df(y) * p - c * p1) / nu;
    return (c * p1 - b * df(y) * p) / nu;
  }
};

// Stops unreached once s exceeds max_length: the slope has collapsed and the
// branch creeps towards the matching level.
inline Branch integrate_branch(const ShootingSystem& sys, double y_start, double rate,
                               double curvature, double y_target, double h, double max_length) {
  Branch br;
  double y = y_start, p = rate * y_start + curvature * y_start * y_start, s = 0.0;
  br.s.push_back(s);
  br.y.push_back(y);
  br.p.push_back(p);
  const auto max_steps = static_cast<std::size_t>(max_length / h) + 1;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const auto k1 = sys.rhs(y, p);
    const auto k2 = sys.rhs(y + 0.5 * h * k1[0], p + 0.5 * h * k1[1]);
    const auto k3 = sys.rhs(y + 0.5 * h * k2[0], p + 0.5 * h * k2[1]);
    const auto k4 = sys.rhs(y + h * k3[0], p + h * k3[1]);
    const double yn = y + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    const double pn = p + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    if (!std::isfinite(yn) || !std::isfinite(pn)) throw NumericalError("shooting: non-finite state");
    if (yn >= y_target) {
      br.s.push_back(s + h);
      br.y.push_back(yn);
      br.p.push_back(pn);
      // locate the crossing inside the step on the quintic interpolant
      const double dy0 = p, dy1 = pn;
      const double sy0 = sys.rhs(y, p)[1], sy1 = sys.rhs(yn, pn)[1];
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hermite5(mid, h, y, dy0, sy0, yn, dy1, sy1) < y_target)
          lo = mid;
        else
          hi = mid;
      }
      const double t = 0.5 * (lo + hi);
      br.s_match = s + t * h;
      br.p_match = hermite5(t, h, p, sy0, sys.p2(y, p), pn, sy1, sys.p2(yn, pn));
      br.reached = true;
      return br;
    }
    if (pn <= 0.0) {
      throw NumericalError("shooting: profile is not monotone (p reached zero before the matching level)");
    }
    y = yn;
    p = pn;
    s += h;
    br.s.push_back(s);
    br.y.push_back(y);
    br.p.push_back(p);
  }
  return br;
}

// Quintic interpolation of (y, p) along a branch at arclength-parameter s.
inline std::array<double, 2> branch_eval(const ShootingSystem& sys, const Branch& br, double s,
                                         double h) {
  const std::size_t m = br.s.size();
  auto i = static_cast<std::size_t>(s / h);
  if (i >= m - 1) i = m - 2;
  const double t = (s - br.s[i]) / h;
  const double y0 = br.y[i], y1 = br.y[i + 1], p0 = br.p[i], p1 = br.p[i + 1];
  const double q0 = sys.rhs(y0, p0)[1], q1 = sys.rhs(y1, p1)[1];
  return {hermite5(t, h, y0, p0, q0, y1, p1, q1),
          hermite5(t, h, p0, q0, sys.p2(y0, p0), p1, q1, sys.p2(y1, p1))};
}

}  // namespace detail

/// Travelling wave of a general bistable polynomial by shooting on c.
///
/// Both halves of the heteroclinic orbit are integrated with fixed-step RK4
/// (step dx/4) from the saddles at v = 0 and v = 1 along their unstable and
/// stable eigendirections, and matched at v = a. The slope mismatch at v = a
/// increases with c, so c is found by bisection down to a bracket of 1e-10.
inline WaveProfile solve_profile(const ReactionSpec& spec, const WaveParams& params,
                                 const GridSpec& grid, double tol = 1e-6) {
  const double a = spec.a();
  if (!(a > 0.0 && a < 1.0)) throw DomainError("solve_profile: reaction has no unique middle zero");
  if (!(spec.df(0.0) < 0.0 && spec.df(1.0) < 0.0))
    throw DomainError("solve_profile: rest states are not both stable");

  const double h = grid.dx() / 4.0;
  constexpr double y_start = 1e-12;
  const double max_length = 8.0 * grid.l_dom;
  // second-order terms of the invariant manifolds p = rate y + m y^2
  const double nu = params.nu, b = params.b;
  auto curvatures = [&](double c, const TailRates& r) {
    return std::pair{-b * 0.5 * spec.d2f(0.0) / (3.0 * r.left * nu - c),
                     b * 0.5 * spec.d2f(1.0) / (-3.0 * r.right * nu + c)};
  };
  auto shoot = [&](double c, detail::Branch* left_out, detail::Branch* right_out) {
    const TailRates r = tail_rates(spec, params, c);
    const auto [m_lo, m_up] = curvatures(c, r);
    detail::ShootingSystem lo_sys{&spec, nu, b, c, false};
    detail::ShootingSystem up_sys{&spec, nu, b, c, true};
    detail::Branch left =
        detail::integrate_branch(lo_sys, y_start, r.left, m_lo, a, h, max_length);
    detail::Branch right =
        detail::integrate_branch(up_sys, y_start, -r.right, m_up, 1.0 - a, h, max_length);
    double mismatch = left.p_match - right.p_match;
    if (!left.reached && !right.reached)
      throw NumericalError("shooting: neither branch reaches v = a at c = " + format_number(c));
    if (!left.reached) mismatch = -std::numeric_limits<double>::infinity();
    if (!right.reached) mismatch = std::numeric_limits<double>::infinity();
    if (left_out) *left_out = std::move(left);
    if (right_out) *right_out = std::move(right);
    return mismatch;
  };

  double scale = std::max({std::abs(spec.df(0.0)), std::abs(spec.df(1.0)), spec.eta(), 1e-3});
  double c_lo = -std::sqrt(params.nu * params.b * scale);
  double c_hi = -c_lo;
  double d_lo = shoot(c_lo, nullptr, nullptr);
  double d_hi = shoot(c_hi, nullptr, nullptr);
  for (int expand = 0; expand < 8 && !(d_lo < 0.0 && d_hi > 0.0); ++expand) {
    c_lo *= 2.0;
    c_hi *= 2.0;
    d_lo = shoot(c_lo, nullptr, nullptr);
    d_hi = shoot(c_hi, nullptr, nullptr);
  }
  if (!(d_lo < 0.0 && d_hi > 0.0))
    throw NumericalError("solve_profile: could not bracket the wave speed in [" +
                         format_number(c_lo) + ", " + format_number(c_hi) + "]");
  while (c_hi - c_lo > 1e-10) {
    const double mid = 0.5 * (c_lo + c_hi);
    const double d = shoot(mid, nullptr, nullptr);
    if (d < 0.0)
      c_lo = mid;
    else
      c_hi = mid;
  }
  double c = 0.5 * (c_lo + c_hi);
  if (c_lo <= 0.0 && c_hi >= 0.0) c = 0.0;
  if (c < 0.0) throw DomainError("solve_profile: negative wave speed; the reaction has negative mean");

  detail::Branch left, right;
  if (!std::isfinite(shoot(c, &left, &right)))
    throw NumericalError("solve_profile: orbit at the converged speed does not fit in 8 l_dom");
  const detail::ShootingSystem lo_sys{&spec, params.nu, params.b, c, false};
  const detail::ShootingSystem up_sys{&spec, params.nu, params.b, c, true};
  const TailRates rates = tail_rates(spec, params, c);
  const auto [m_lo, m_up] = curvatures(c, rates);

  // Orbit coordinate xi: left branch s runs in xi, v = a sits at xi = left.s_match,
  // right branch maps via xi = left.s_match + right.s_match - s.
  const double xi_a = left.s_match;
  auto orbit = [&](double xi) -> ProfilePoint {
    ProfilePoint pt;
    if (xi <= xi_a) {
      if (xi <= 0.0) {
        const double e = std::exp(rates.left * xi);
        pt.v = y_start * e;
        pt.vc = 1.0 - pt.v;
        pt.vx = rates.left * pt.v + m_lo * pt.v * pt.v;
      } else {
        const auto yp = detail::branch_eval(lo_sys, left, xi, h);
        pt.v = yp[0];
        pt.vc = 1.0 - pt.v;
        pt.vx = yp[1];
      }
      pt.vxx = (c * pt.vx - params.b * spec.f(pt.v)) / params.nu;
    } else {
      const double s = xi_a + right.s_match - xi;
      if (s <= 0.0) {
        const double e = std::exp(-rates.right * s);
        pt.vc = y_start * e;
        pt.vx = -rates.right * pt.vc + m_up * pt.vc * pt.vc;
      } else {
        const auto yp = detail::branch_eval(up_sys, right, std::min(s, right.s_match), h);
        pt.vc = yp[0];
        pt.vx = yp[1];
      }
      pt.v = 1.0 - pt.vc;
      pt.vxx = (c * pt.vx - params.b * spec.f_from_one(pt.vc)) / params.nu;
    }
    if (pt.vx < 0.0) throw NumericalError("solve_profile: profile is not monotone");
    return pt;
  };

  // recentre so that v = 1/2 at x = 0
  double lo = -1.0, hi = xi_a + right.s_match + 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (orbit(mid).v < 0.5)
      lo = mid;
    else
      hi = mid;
  }
  const double xi_half = 0.5 * (lo + hi);

  WaveProfile w;
  w.params = params;
  w.spec = spec;
  w.c = c;
  w.grid = grid;
  w.tails = rates;
  w.x = grid.nodes();
  const std::size_t n = grid.n;
  w.v.resize(n);
  w.vc.resize(n);
  w.vx.resize(n);
  w.vxx.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ProfilePoint pt = orbit(w.x[i] + xi_half);
    w.v[i] = pt.v;
    w.vc[i] = pt.vc;
    w.vx[i] = pt.vx;
    w.vxx[i] = pt.vxx;
  }
  double vx_max = 0.0;
  for (double d : w.vx) vx_max = std::max(vx_max, d);
  if (!(w.v.front() < a && w.v.back() > a))
    throw NumericalError("solve_profile: front does not fit inside the truncated domain");
  if (profile_residual(w) > tol * vx_max)
    throw NumericalError("solve_profile: profile residual exceeds tolerance");
  w.landmarks = find_landmarks(w, spec, {0.5});
  return w;
}

namespace detail {

template <class F>
double bracketed_root(F&& fn, double lo, double hi, const std::string& what) {
  const double flo = fn(lo), fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw NumericalError("landmark " + what + " lies outside the truncated domain");
  boost::uintmax_t iters = 300;
  auto r = boost::math::tools::toms748_solve(fn, lo, hi, flo, fhi,
                                             boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace detail

/// Landmarks x_alpha (ratio = alpha c / nu), x0 (v = a), x1 (vxx = 0) and
/// x_star (v = v*), all located on the continuous profile.
inline Landmarks find_landmarks(const WaveProfile& w, const ReactionSpec& spec,
                                const std::vector<double>& alphas) {
  const double cn = w.c / w.params.nu;
  const double beta = 0.5 * cn;
  const double bn = w.params.b / w.params.nu;
  const double g_minus = beta - std::sqrt(beta * beta - bn * spec.df(0.0));
  const double g_plus = beta + std::sqrt(beta * beta - bn * spec.df(1.0));
  const double lo = w.x.front(), hi = w.x.back();
  Landmarks lm;
  for (double alpha : alphas) {
    const double target = alpha * cn;
    if (!(target > g_minus && target < g_plus))
      throw DomainError("find_landmarks: alpha=" + format_number(alpha) +
                        " gives a target outside the ratio range");
    lm.x_alpha[alpha] = detail::bracketed_root(
        [&](double xq) { return w.ratio_at(xq) - target; }, lo, hi,
        "x_alpha(" + format_number(alpha) + ")");
  }
  const double a = spec.a();
  lm.x0 = detail::bracketed_root([&](double xq) { return w.eval(xq).v - a; }, lo, hi, "x0");
  lm.x1 = detail::bracketed_root([&](double xq) { return -w.eval(xq).vxx; }, lo, hi, "x1");
  const double vs = spec.v_star();
  lm.x_star = detail::bracketed_root([&](double xq) { return w.eval(xq).v - vs; }, lo, hi, "x_star");
  return lm;
}

/// Weighted integrals by the trapezoid rule plus exact exponential tails.
inline WaveIntegrals weighted_integrals(const WaveProfile& w) {
  const double cn = w.c / w.params.nu;
  const double dx = w.grid.dx();
  const std::size_t n = w.size();
  auto integrate = [&](double alpha, const std::vector<double>& d, double rate_l, double rate_r) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(-alpha * w.x[i]) * d[i] * d[i];
    const double left_rate = 2.0 * rate_l - alpha;
    const double right_rate = alpha - 2.0 * rate_r;
    if (!(left_rate > 0.0) || !(right_rate > 0.0))
      throw NumericalError("weighted_integrals: integrand tails do not decay");
    return trapezoid(g, dx) + g.front() / left_rate + g.back() / right_rate;
  };
  WaveIntegrals out;
  out.Z = integrate(cn, w.vx, w.tails.left, w.tails.right);
  out.Zhalf = integrate(0.5 * cn, w.vx, w.tails.left, w.tails.right);
  out.norm_vx_sq = integrate(0.0, w.vx, w.tails.left, w.tails.right);
  out.norm_vxx_sq = integrate(0.0, w.vxx, w.tails.left, w.tails.right);
  for (double q : {out.Z, out.Zhalf, out.norm_vx_sq, out.norm_vxx_sq})
    if (!(q > 0.0) || !std::isfinite(q)) throw NumericalError("weighted_integrals: non-positive integral");
  return out;
}

/// Pointwise bounds every valid front satisfies, checked node by node.
inline ValidationReport verify_profile_bounds(const WaveProfile& w, const ReactionSpec& spec,
                                              const Tolerance& tol = {}) {
  ValidationReport rep;
  const std::size_t n = w.size();
  const double bn = w.params.b / w.params.nu;
  const double cn = w.c / w.params.nu;
  constexpr double mono_slack = 1e-12;

  {
    Check c{"energy bound vx^2 <= (2b/nu) int_v^1 f", true, std::nullopt, {}};
    for (std::size_t i = 0; i < n; ++i) {
      const double rhs = 2.0 * bn * spec.integral_to_one(w.vc[i]);
      if (!tol.leq(w.vx[i] * w.vx[i], rhs)) {
        c.passed = false;
        c.witness = w.x[i];
        break;
      }
    }
    rep.add(std::move(c));
  }
  {
    Check c{"ratio (b/nu) f(v)/vx increasing", true, std::nullopt, {}};
    double prev = w.ratio(0);
    for (std::size_t i = 1; i < n; ++i) {
      const double r = w.ratio(i);
      if (r < prev - mono_slack * (1.0 + std::abs(prev))) {
        c.passed = false;
        c.witness = w.x[i];
        break;
      }
      prev = r;
    }
    rep.add(std::move(c));
  }
  {
    const std::size_t ic = n / 2;
    const double k_plus = w.vc[ic] / w.vx[ic];
    const double k_minus = w.v[ic] / w.vx[ic];
    Check cp{"(1-v)/vx <= K+ right of centre", true, std::nullopt, "K+=" + format_number(k_plus)};
    Check cm{"v/vx <= K- left of centre", true, std::nullopt, "K-=" + format_number(k_minus)};
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= ic && cp.passed && !tol.leq(w.vc[i] / w.vx[i], k_plus)) {
        cp.passed = false;
        cp.witness = w.x[i];
      }
      if (i <= ic && cm.passed && !tol.leq(w.v[i] / w.vx[i], k_minus)) {
        cm.passed = false;
        cm.witness = w.x[i];
      }
    }
    rep.add(std::move(cp));
    rep.add(std::move(cm));
  }
  {
    Check c{"vxx/vx decreasing", true, std::nullopt, {}};
    double prev = w.vxx[0] / w.vx[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double r = w.vxx[i] / w.vx[i];
      if (r > prev + mono_slack * (1.0 + std::abs(prev))) {
        c.passed = false;
        c.witness = w.x[i];
        break;
      }
      prev = r;
    }
    rep.add(std::move(c));
  }
  {
    // log of e^{-2(c/nu)x} vx^2 rises up to x0 and falls after it
    Check c{"e^{-2cx/nu} vx^2 unimodal about x0", true, std::nullopt, {}};
    const double x0 = w.landmarks.x0;
    double prev = -2.0 * cn * w.x[0] + 2.0 * std::log(w.vx[0]);
    for (std::size_t i = 1; i < n; ++i) {
      const double cur = -2.0 * cn * w.x[i] + 2.0 * std::log(w.vx[i]);
      const double slack = mono_slack * (1.0 + std::abs(prev));
      const bool ok = w.x[i] <= x0 ? cur >= prev - slack : (w.x[i - 1] < x0 || cur <= prev + slack);
      if (!ok) {
        c.passed = false;
        c.witness = w.x[i];
        break;
      }
      prev = cur;
    }
    rep.add(std::move(c));
  }
  return rep;
}

}  // namespace wavegauge
