#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavegauge/core.hpp"

namespace wavegauge {

/// Uniform grid on [-l_dom, l_dom] standing in for the real line.
struct GridSpec {
  double l_dom = 25.0;
  std::size_t n = 4096;

  static GridSpec make(double l_dom, std::size_t n) {
    if (!(l_dom > 0.0) || !std::isfinite(l_dom))
      throw DomainError("grid: l_dom must be positive, got " + format_number(l_dom));
    if (n < 16 || (n & (n - 1)) != 0)
      throw DomainError("grid: n must be a power of two >= 16, got " + std::to_string(n));
    return GridSpec{l_dom, n};
  }

  [[nodiscard]] double dx() const { return 2.0 * l_dom / static_cast<double>(n - 1); }
  [[nodiscard]] double x(std::size_t i) const {
    return -l_dom + static_cast<double>(i) * dx();
  }
  [[nodiscard]] std::vector<double> nodes() const {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = x(i);
    return xs;
  }
  // nearest node index, clamped to the grid
  [[nodiscard]] std::size_t nearest(double xq) const {
    const double s = std::round((xq + l_dom) / dx());
    if (s <= 0.0) return 0;
    return std::min(n - 1, static_cast<std::size_t>(s));
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Real samples on a grid.
struct Field {
  GridSpec grid;
  std::vector<double> vals;

  Field() = default;
  explicit Field(const GridSpec& g, double fill = 0.0) : grid(g), vals(g.n, fill) {}
  Field(const GridSpec& g, std::vector<double> v) : grid(g), vals(std::move(v)) {
    if (vals.size() != grid.n) throw DomainError("field: sample count does not match grid");
  }

  template <class F>
  static Field sample(const GridSpec& g, F&& fn) {
    Field out(g);
    for (std::size_t i = 0; i < g.n; ++i) out.vals[i] = fn(g.x(i));
    return out;
  }

  [[nodiscard]] std::size_t size() const { return vals.size(); }
  double& operator[](std::size_t i) { return vals[i]; }
  double operator[](std::size_t i) const { return vals[i]; }
  [[nodiscard]] std::span<const double> span() const { return vals; }
  [[nodiscard]] std::span<double> span() { return vals; }
};

enum class Boundary { dirichlet, neumann };

inline Boundary parse_boundary(std::string_view tag) {
  if (tag == "dirichlet") return Boundary::dirichlet;
  if (tag == "neumann") return Boundary::neumann;
  throw DomainError("unknown boundary condition tag '" + std::string(tag) + "'");
}

/// Trapezoid rule of samples with spacing dx.
inline double trapezoid(std::span<const double> y, double dx) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * dx;
}

/// Second-order central difference Laplacian (without the diffusion coefficient).
/// Dirichlet uses zero ghost values beyond both ends; Neumann mirrors.
inline Field apply_laplacian(const Field& f, Boundary bc) {
  const std::size_t n = f.size();
  if (n < 3) throw DomainError("laplacian: need at least 3 nodes");
  const double inv = 1.0 / (f.grid.dx() * f.grid.dx());
  Field out(f.grid);
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv;
  switch (bc) {
    case Boundary::dirichlet:
      out[0] = (f[1] - 2.0 * f[0]) * inv;
      out[n - 1] = (f[n - 2] - 2.0 * f[n - 1]) * inv;
      break;
    case Boundary::neumann:
      out[0] = 2.0 * (f[1] - f[0]) * inv;
      out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * inv;
      break;
  }
  return out;
}

inline double inner(const Field& f, const Field& g) {
  if (!(f.grid == g.grid)) throw DomainError("inner: grid mismatch");
  const std::size_t n = f.size();
  double s = 0.5 * (f[0] * g[0] + f[n - 1] * g[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) s += f[i] * g[i];
  return s * f.grid.dx();
}

/// Sum of squared forward differences times dx: the discrete Dirichlet energy.
inline double gradient_energy(std::span<const double> f, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double d = f[i + 1] - f[i];
    s += d * d;
  }
  return s / dx;
}

struct Norms {
  double h = 0.0;
  double v = 0.0;
  double sup = 0.0;
};

/// H, V and sup norms. The V-norm gradient uses forward differences, which
/// carries an O(dx) bias relative to the continuum norm.
inline Norms norms(const Field& f) {
  Norms out;
  const double h2 = inner(f, f);
  out.h = std::sqrt(h2);
  out.v = std::sqrt(h2 + gradient_energy(f.span(), f.grid.dx()));
  for (double x : f.vals) out.sup = std::max(out.sup, std::abs(x));
  return out;
}

inline double h_norm(const Field& f) { return std::sqrt(inner(f, f)); }

/// Central-difference derivative; second-order one-sided stencils at the ends.
inline std::vector<double> derivative(std::span<const double> f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
  return d;
}

/// Linear interpolation of grid samples; clamps outside the grid.
inline double interpolate_linear(const Field& f, double xq) {
  const auto& g = f.grid;
  const double s = (xq + g.l_dom) / g.dx();
  if (s <= 0.0) return f[0];
  if (s >= static_cast<double>(g.n - 1)) return f[g.n - 1];
  const auto i = static_cast<std::size_t>(s);
  const double t = s - static_cast<double>(i);
  return (1.0 - t) * f[i] + t * f[i + 1];
}

/// Tridiagonal system with a fixed matrix, factorized once (Thomas algorithm).
class TridiagonalSolver {
 public:
  TridiagonalSolver() = default;

  TridiagonalSolver(std::vector<double> lower, std::vector<double> diag,
                    std::vector<double> upper)
      : lower_(std::move(lower)), cprime_(diag.size()), denom_(diag.size()) {
    const std::size_t n = diag.size();
    if (n == 0 || lower_.size() != n || upper.size() != n)
      throw DomainError("tridiagonal: inconsistent band sizes");
    double d = diag[0];
    if (d == 0.0 || !std::isfinite(d)) throw NumericalError("tridiagonal: singular pivot at row 0");
    denom_[0] = 1.0 / d;
    cprime_[0] = upper[0] * denom_[0];
    for (std::size_t i = 1; i < n; ++i) {
      d = diag[i] - lower_[i] * cprime_[i - 1];
      if (d == 0.0 || !std::isfinite(d))
        throw NumericalError("tridiagonal: singular pivot at row " + std::to_string(i));
      denom_[i] = 1.0 / d;
      cprime_[i] = upper[i] * denom_[i];
    }
  }

  /// Solves in place: rhs becomes the solution.
  void solve(std::span<double> rhs) const {
    const std::size_t n = denom_.size();
    rhs[0] *= denom_[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * denom_[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cprime_[i] * rhs[i + 1];
  }

  [[nodiscard]] std::size_t size() const { return denom_.size(); }

 private:
  std::vector<double> lower_;
  std::vector<double> cprime_;
  std::vector<double> denom_;
};

/// Factorized (I - dt*nu*Laplacian) with homogeneous Dirichlet ghosts.
inline TridiagonalSolver implicit_diffusion(const GridSpec& g, double nu, double dt) {
  const double r = dt * nu / (g.dx() * g.dx());
  std::vector<double> lo(g.n, -r), di(g.n, 1.0 + 2.0 * r), up(g.n, -r);
  lo[0] = 0.0;
  up[g.n - 1] = 0.0;
  return TridiagonalSolver(std::move(lo), std::move(di), std::move(up));
}

}  // namespace wavegauge
