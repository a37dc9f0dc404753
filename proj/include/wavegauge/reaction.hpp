#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "wavegauge/core.hpp"

namespace wavegauge {

/// Real polynomial with ascending coefficients c[0] + c[1] x + ...
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
    if (c_.empty()) c_.push_back(0.0);
  }

  [[nodiscard]] double operator()(double x) const {
    double s = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) s = s * x + c_[k];
    return s;
  }

  [[nodiscard]] Polynomial derivative() const {
    if (c_.size() <= 1) return Polynomial({0.0});
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
  }

  [[nodiscard]] Polynomial antiderivative() const {
    std::vector<double> a(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(a));
  }

  /// Coefficients of s -> p(x0 + s).
  [[nodiscard]] Polynomial shifted(double x0) const {
    std::vector<double> q = c_;
    const std::size_t n = q.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = n - 1; k > i; --k) q[k - 1] += x0 * q[k];
    return Polynomial(std::move(q));
  }

  /// Coefficients of s -> p(-s).
  [[nodiscard]] Polynomial reflected() const {
    std::vector<double> q = c_;
    for (std::size_t k = 1; k < q.size(); k += 2) q[k] = -q[k];
    return Polynomial(std::move(q));
  }

  [[nodiscard]] std::size_t degree() const { return c_.size() - 1; }
  [[nodiscard]] double coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
  [[nodiscard]] const std::vector<double>& coeffs() const { return c_; }

 private:
  std::vector<double> c_{0.0};
};

namespace detail {

// Sign changes of p on (lo, hi), refined by TOMS 748.
inline std::vector<double> sign_change_roots(const Polynomial& p, double lo, double hi,
                                             std::size_t samples) {
  std::vector<double> roots;
  const double h = (hi - lo) / static_cast<double>(samples);
  double x_prev = lo;
  double y_prev = p(lo);
  for (std::size_t i = 1; i <= samples; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double y = p(x);
    if (y == 0.0) {
      if (i < samples) roots.push_back(x);
    } else if (y_prev != 0.0 && (y_prev < 0.0) != (y < 0.0)) {
      boost::uintmax_t iters = 200;
      auto r = boost::math::tools::toms748_solve(
          [&](double t) { return p(t); }, x_prev, x, y_prev, y,
          boost::math::tools::eps_tolerance<double>(52), iters);
      roots.push_back(0.5 * (r.first + r.second));
    }
    x_prev = x;
    y_prev = y;
  }
  return roots;
}

// Maximum of p on [lo, hi]: dense scan, then Brent refinement.
inline double max_on_interval(const Polynomial& p, double lo, double hi) {
  constexpr std::size_t samples = 2000;
  const double h = (hi - lo) / samples;
  std::size_t best = 0;
  double best_val = p(lo);
  for (std::size_t i = 1; i <= samples; ++i) {
    const double v = p(lo + h * static_cast<double>(i));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = std::max(lo, lo + h * (static_cast<double>(best) - 1.0));
  const double b = std::min(hi, lo + h * (static_cast<double>(best) + 1.0));
  auto r = boost::math::tools::brent_find_minima([&](double t) { return -p(t); }, a, b, 52);
  return std::max(best_val, -r.second);
}

}  // namespace detail

class ReactionSpec;
inline ReactionSpec make_nagumo(double a);
inline ReactionSpec make_polynomial_reaction(std::vector<double> coeffs, std::string name = "cubic");

/// Bistable polynomial reaction term with the global constants the
/// nonlinear estimates consume. Immutable after construction.
class ReactionSpec {
 public:
  [[nodiscard]] double f(double v) const { return f_(v); }
  [[nodiscard]] double df(double v) const { return df_(v); }
  [[nodiscard]] double d2f(double v) const { return d2f_(v); }

  /// f(1 - y), accurate for small y where 1 - y would round.
  [[nodiscard]] double f_from_one(double y) const { return f_at_one_(y); }
  [[nodiscard]] double df_from_one(double y) const { return df_at_one_(y); }

  /// Integral of f over [lo, hi], exact for polynomials.
  [[nodiscard]] double integral(double lo, double hi) const { return F_(hi) - F_(lo); }
  /// Integral of f over [1 - y, 1].
  [[nodiscard]] double integral_to_one(double y) const { return F_at_one_(y); }

  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] double v_star() const { return v_star_; }
  [[nodiscard]] double eta1() const { return eta1_; }
  [[nodiscard]] double lip_l() const { return lip_l_; }
  [[nodiscard]] double eta2() const { return eta2_; }
  [[nodiscard]] double eta() const { return eta_; }
  [[nodiscard]] const Polynomial& polynomial() const { return f_; }
  [[nodiscard]] const std::string& name() const { return name_; }

  friend ReactionSpec make_nagumo(double a);
  friend ReactionSpec make_polynomial_reaction(std::vector<double> coeffs, std::string name);

 private:
  void build_derived() {
    df_ = f_.derivative();
    d2f_ = df_.derivative();
    F_ = f_.antiderivative();
    f_at_one_ = f_.shifted(1.0).reflected();
    // f(1) = 0 up to rounding in the shift; keep the expansion exact at y = 0
    double mag = 0.0;
    for (double c : f_.coeffs()) mag += std::abs(c);
    if (std::abs(f_at_one_.coeff(0)) <= 64.0 * std::numeric_limits<double>::epsilon() * mag) {
      auto q = f_at_one_.coeffs();
      q[0] = 0.0;
      f_at_one_ = Polynomial(std::move(q));
    }
    df_at_one_ = df_.shifted(1.0).reflected();
    F_at_one_ = f_at_one_.antiderivative();
  }

  Polynomial f_, df_, d2f_, F_, f_at_one_, df_at_one_, F_at_one_;
  double a_ = std::numeric_limits<double>::quiet_NaN();
  double v_star_ = std::numeric_limits<double>::quiet_NaN();
  double eta1_ = std::numeric_limits<double>::infinity();
  double lip_l_ = std::numeric_limits<double>::infinity();
  double eta2_ = std::numeric_limits<double>::infinity();
  double eta_ = std::numeric_limits<double>::quiet_NaN();
  std::string name_;
};

/// General polynomial reaction. The middle zero a and the inflection v* are
/// located numerically; they are NaN when no unique candidate exists in (0,1)
/// (validate_assumptions reports that case). Growth constants are finite only
/// for degree <= 3.
inline ReactionSpec make_polynomial_reaction(std::vector<double> coeffs, std::string name) {
  for (double c : coeffs)
    if (!std::isfinite(c)) throw DomainError("reaction: non-finite coefficient");
  ReactionSpec s;
  s.f_ = Polynomial(std::move(coeffs));
  s.name_ = std::move(name);
  s.build_derived();

  const auto zeros = detail::sign_change_roots(s.f_, 1e-9, 1.0 - 1e-9, 4096);
  if (zeros.size() == 1) s.a_ = zeros.front();
  const auto infl = detail::sign_change_roots(s.d2f_, 1e-9, 1.0 - 1e-9, 4096);
  if (infl.size() == 1) s.v_star_ = infl.front();

  s.eta_ = detail::max_on_interval(s.df_, 0.0, 1.0);

  // sup of f' over R is finite iff f' -> -inf at both ends (or f' is constant)
  const std::size_t deg_d = s.df_.degree();
  const double lead = s.df_.coeff(deg_d);
  if (deg_d == 0) {
    s.eta1_ = lead;
  } else if (deg_d % 2 == 0 && lead < 0.0) {
    double radius = 1.0;
    for (std::size_t k = 0; k < deg_d; ++k) radius = std::max(radius, 1.0 + std::abs(s.df_.coeff(k) / lead));
    s.eta1_ = detail::max_on_interval(s.df_, -radius, radius);
  }

  const std::size_t deg = s.f_.degree();
  if (deg <= 3) {
    const double c1 = s.f_.coeff(1), c2 = s.f_.coeff(2), c3 = s.f_.coeff(3);
    s.lip_l_ = std::abs(c1) + std::abs(c2) + 1.5 * std::abs(c3);
    const double half_curv = std::max(std::abs(s.d2f_(0.0)), std::abs(s.d2f_(1.0))) / 2.0;
    s.eta2_ = std::max({half_curv, std::abs(c3), 1.0});
  }
  return s;
}

/// Nagumo cubic f(v) = v (1 - v) (v - a).
///
/// Constants in closed form: v* = (1+a)/3, eta = eta1 = (1 - a + a^2)/3,
/// eta2 = max(1+a, 2-a, 1). The cubic-growth Lipschitz constant is
/// L = |c1| + |c2| + 1.5|c3| = 2.5 + 2a,
/// which follows from f(x1) - f(x2) = (x1-x2)(c1 + c2(x1+x2) + c3(x1^2+x1x2+x2^2))
/// together with |x1|+|x2| <= 1 + x1^2 + x2^2 and |x1^2+x1x2+x2^2| <= 1.5(x1^2+x2^2).
inline ReactionSpec make_nagumo(double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("nagumo: a must lie in (0,1), got " + format_number(a));
  ReactionSpec s = make_polynomial_reaction({0.0, -a, 1.0 + a, -1.0}, "nagumo");
  s.a_ = a;
  s.v_star_ = (1.0 + a) / 3.0;
  s.eta_ = (1.0 - a + a * a) / 3.0;
  s.eta1_ = s.eta_;
  s.eta2_ = std::max({1.0 + a, 2.0 - a, 1.0});
  return s;
}

/// Structural checks on the zeros, slopes, convexity and mean of f, sampled
/// uniformly on [-0.1, 1.1]. Failed checks carry a witness point.
inline ValidationReport validate_assumptions(const ReactionSpec& spec, std::size_t samples) {
  if (samples < 100) throw DomainError("validate_assumptions: samples must be >= 100");
  ValidationReport rep;
  constexpr double zero_tol = 1e-12;
  const double a = spec.a();
  const double vs = spec.v_star();

  auto zero_check = [&](const std::string& name, double v) {
    const double fv = spec.f(v);
    rep.add(name, std::isfinite(fv) && std::abs(fv) <= zero_tol, v,
            "f=" + format_number(fv));
  };
  zero_check("f(0)=0", 0.0);
  zero_check("f(1)=0", 1.0);
  const bool a_ok = std::isfinite(a) && a > 0.0 && a < 1.0;
  rep.add("a in (0,1)", a_ok, std::nullopt, a_ok ? "" : "no unique interior zero");
  if (a_ok) zero_check("f(a)=0", a);

  std::vector<double> vs_sample(samples);
  for (std::size_t i = 0; i < samples; ++i)
    vs_sample[i] = -0.1 + 1.2 * static_cast<double>(i) / static_cast<double>(samples - 1);

  auto sign_check = [&](const std::string& name, double lo, double hi, auto pred) {
    Check c{name, true, std::nullopt, {}};
    for (double v : vs_sample) {
      if (v <= lo || v >= hi) continue;
      if (!pred(v)) {
        c.passed = false;
        c.witness = v;
        break;
      }
    }
    rep.add(std::move(c));
  };
  if (a_ok) {
    sign_check("f<0 on (0,a)", 0.0, a, [&](double v) { return spec.f(v) < 0.0; });
    sign_check("f>0 on (a,1)", a, 1.0, [&](double v) { return spec.f(v) > 0.0; });
  }
  rep.add("f'(0)<0", spec.df(0.0) < 0.0, 0.0);
  if (a_ok) rep.add("f'(a)>0", spec.df(a) > 0.0, a);
  rep.add("f'(1)<0", spec.df(1.0) < 0.0, 1.0);

  const bool vs_ok = std::isfinite(vs) && (!a_ok || (vs >= a - 1e-12 && vs < 1.0));
  rep.add("v* in [a,1)", vs_ok, std::nullopt, vs_ok ? "" : "no unique inflection in [a,1)");
  if (vs_ok) {
    Check convex{"f''>0 on [0,v*)", true, std::nullopt, {}};
    Check concave{"f''<0 on (v*,1]", true, std::nullopt, {}};
    for (double v : vs_sample) {
      if (v >= 0.0 && v < vs && !(spec.d2f(v) > 0.0) && convex.passed) {
        // the sample nearest v* may round onto the inflection itself
        if (std::abs(v - vs) > 1e-9) {
          convex.passed = false;
          convex.witness = v;
        }
      }
      if (v > vs && v <= 1.0 && !(spec.d2f(v) < 0.0) && concave.passed) {
        if (std::abs(v - vs) > 1e-9) {
          concave.passed = false;
          concave.witness = v;
        }
      }
    }
    rep.add(std::move(convex));
    rep.add(std::move(concave));
  }

  // composite Simpson, doubled until two successive estimates agree to 1e-10
  auto simpson = [&](std::size_t m) {
    const double h = 1.0 / static_cast<double>(m);
    double s = spec.f(0.0) + spec.f(1.0);
    for (std::size_t i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * spec.f(h * static_cast<double>(i));
    return s * h / 3.0;
  };
  double prev = simpson(16), cur = simpson(32);
  for (std::size_t m = 64; std::abs(cur - prev) > 1e-10 && m <= (1u << 20); m *= 2) {
    prev = cur;
    cur = simpson(m);
  }
  rep.add("integral of f over [0,1] >= 0", cur >= -1e-9, std::nullopt, "integral=" + format_number(cur));

  rep.add("sup f' finite", std::isfinite(spec.eta1()));
  rep.add("eta <= eta1", spec.eta() <= spec.eta1() + 1e-12);
  return rep;
}

/// f(u + v_ref) - f(v_ref).
inline double shifted_increment(const ReactionSpec& spec, double u, double v_ref) {
  return spec.f(u + v_ref) - spec.f(v_ref);
}

/// f(u + v_ref) - f(v_ref) - f'(v_ref) u.
inline double linearization_remainder(const ReactionSpec& spec, double u, double v_ref) {
  return spec.f(u + v_ref) - spec.f(v_ref) - spec.df(v_ref) * u;
}

}  // namespace wavegauge
