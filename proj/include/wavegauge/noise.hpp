#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavegauge/core.hpp"
#include "wavegauge/grid.hpp"
#include "wavegauge/wave.hpp"

namespace wavegauge {

enum class NoiseKind { white, gaussian_kernel };
enum class SigmaKind { nagumo_shape, constant };

inline NoiseKind parse_noise_kind(std::string_view s) {
  if (s == "white") return NoiseKind::white;
  if (s == "gaussian_kernel" || s == "gaussian") return NoiseKind::gaussian_kernel;
  throw DomainError("noise.kind: unknown value '" + std::string(s) + "'");
}

inline SigmaKind parse_sigma_kind(std::string_view s) {
  if (s == "vv1m" || s == "nagumo_shape") return SigmaKind::nagumo_shape;
  if (s == "constant" || s == "additive") return SigmaKind::constant;
  throw DomainError("noise.sigma: unknown value '" + std::string(s) + "'");
}

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 stream, usable as a standard uniform random bit generator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    const std::uint64_t z = mix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return z;
  }

 private:
  std::uint64_t state_;
};

/// Normal variates keyed by (seed, step): the vector for a step does not
/// depend on which thread draws it or on what was drawn before.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : seed_(seed) {}

  void normals(std::uint64_t step, std::span<double> out) const {
    SplitMix64 eng(mix64(mix64(seed_) ^ (step * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL)));
    std::normal_distribution<double> nd(0.0, 1.0);
    for (double& z : out) z = nd(eng);
  }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Finite-dimensional Q-Wiener noise with one U-coordinate per grid node and
/// the pointwise dispersion amp * sigma(v).
///
/// For the white kind the node-to-coordinate map is identity/sqrt(dx); for the
/// Gaussian kernel it is sqrt(dx) k(x_i, y_j) with k = exp(-(x-y)^2/(2 l^2)).
/// The kernel is Toeplitz, so only its first row is stored.
struct NoiseModel {
  NoiseKind kind = NoiseKind::white;
  SigmaKind sigma_kind = SigmaKind::nagumo_shape;
  double amp = 0.0;
  double corr_len = 1.0;
  GridSpec grid;
  std::vector<double> kernel_row;  // k at offsets d * dx, truncated below 1e-18
  std::vector<double> row_sq;      // sum_j M_ij^2 for each node i
  double l_sigma = 0.0;

  [[nodiscard]] double sigma(double v) const {
    if (sigma_kind == SigmaKind::constant) return 1.0;
    return (v > 0.0 && v < 1.0) ? v * (1.0 - v) : 0.0;
  }
  /// Lipschitz constant of sigma.
  [[nodiscard]] double sigma_lipschitz() const { return sigma_kind == SigmaKind::constant ? 0.0 : 1.0; }
  [[nodiscard]] bool is_zero() const { return amp == 0.0; }
  [[nodiscard]] bool certifiable() const { return sigma_kind == SigmaKind::nagumo_shape; }
};

inline NoiseModel build_noise(NoiseKind kind, SigmaKind sigma_kind, double amp,
                              const GridSpec& grid, double corr_len = 1.0) {
  if (!(amp >= 0.0) || !std::isfinite(amp)) throw DomainError("noise.amp must be nonnegative");
  if (kind == NoiseKind::gaussian_kernel && !(corr_len > 0.0))
    throw DomainError("noise.corr_len must be positive");
  NoiseModel m;
  m.kind = kind;
  m.sigma_kind = sigma_kind;
  m.amp = amp;
  m.corr_len = corr_len;
  m.grid = grid;
  const std::size_t n = grid.n;
  const double dx = grid.dx();
  m.row_sq.assign(n, 1.0 / dx);
  if (kind == NoiseKind::gaussian_kernel) {
    for (std::size_t d = 0; d < n; ++d) {
      const double z = static_cast<double>(d) * dx / corr_len;
      const double k = std::exp(-0.5 * z * z);
      if (k < 1e-18) break;
      m.kernel_row.push_back(k);
    }
    const std::size_t band = m.kernel_row.size();
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      const std::size_t lo = i + 1 > band ? i + 1 - band : 0;
      const std::size_t hi = std::min(n - 1, i + band - 1);
      for (std::size_t j = lo; j <= hi; ++j) {
        const double k = m.kernel_row[i > j ? i - j : j - i];
        s += k * k;
      }
      m.row_sq[i] = s * dx;
    }
  }
  const double row_max = *std::max_element(m.row_sq.begin(), m.row_sq.end());
  m.l_sigma = amp * m.sigma_lipschitz() * std::sqrt(row_max);
  return m;
}

/// sqrt(dt) M xi for the step's standard normal vector xi.
inline Field sample_increment(const NoiseModel& model, const NoiseStream& rng, std::uint64_t step,
                              double dt) {
  if (!(dt > 0.0)) throw DomainError("sample_increment: dt must be positive");
  const std::size_t n = model.grid.n;
  Field out(model.grid);
  if (model.is_zero()) return out;
  std::vector<double> xi(n);
  rng.normals(step, xi);
  const double dx = model.grid.dx();
  if (model.kind == NoiseKind::white) {
    const double s = std::sqrt(dt / dx);
    for (std::size_t i = 0; i < n; ++i) out[i] = s * xi[i];
    return out;
  }
  const std::size_t band = model.kernel_row.size();
  const double s = std::sqrt(dt * dx);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i + 1 > band ? i + 1 - band : 0;
    const std::size_t hi = std::min(n - 1, i + band - 1);
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += model.kernel_row[i > j ? i - j : j - i] * xi[j];
    out[i] = s * acc;
  }
  return out;
}

/// amp * sigma(v_i) * dW_i.
inline Field apply_dispersion(const NoiseModel& model, const Field& v, const Field& dw) {
  if (v.size() != dw.size()) throw DomainError("apply_dispersion: shape mismatch");
  Field out(v.grid);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = model.amp * model.sigma(v[i]) * dw[i];
  return out;
}

/// Discrete Hilbert-Schmidt norm squared of h -> amp sigma(v) M h into the
/// trapezoid-free H-norm: sum_i (amp sigma(v_i))^2 dx sum_j M_ij^2. This is the
/// expected squared H-norm of one increment divided by dt.
inline double hs_norm_sq(const NoiseModel& model, const Field& v) {
  const double dx = model.grid.dx();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = model.amp * model.sigma(v[i]);
    s += a * a * model.row_sq[i];
  }
  return s * dx;
}

/// Amplitude that makes hs_norm_sq(v) equal to target.
inline double amplitude_for_hs(const NoiseModel& unit_model, const Field& v, double target) {
  NoiseModel m = unit_model;
  m.amp = 1.0;
  const double base = hs_norm_sq(m, v);
  if (!(base > 0.0)) throw DomainError("noise.hs_target: dispersion vanishes on the wave");
  return std::sqrt(target / base);
}

/// HS norm of the dispersion along the wave is unchanged by grid shifts of the wave.
inline ValidationReport translation_check(const NoiseModel& model, const WaveProfile& w,
                                          const std::vector<long>& shifts, double rel_tol) {
  ValidationReport rep;
  const Field base(w.grid, w.v);
  const double ref = hs_norm_sq(model, base);
  const double dx = w.grid.dx();
  for (long s : shifts) {
    if (std::abs(static_cast<double>(s) * dx) > 0.5 * w.grid.l_dom)
      throw DomainError("translation_check: shift moves the front too close to the boundary");
    Field shifted = Field::sample(w.grid, [&](double x) {
      return w.eval(x - static_cast<double>(s) * dx).v;
    });
    const double val = hs_norm_sq(model, shifted);
    const double rel = ref > 0.0 ? std::abs(val - ref) / ref : std::abs(val);
    rep.add("HS norm invariant under shift " + std::to_string(s), rel <= rel_tol,
            static_cast<double>(s) * dx, "relative difference " + format_number(rel));
  }
  return rep;
}

}  // namespace wavegauge
