#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "wavegauge/constants.hpp"
#include "wavegauge/core.hpp"
#include "wavegauge/grid.hpp"
#include "wavegauge/reaction.hpp"
#include "wavegauge/wave.hpp"

namespace wavegauge {

struct PhaseState {
  double c_shift = 0.0;
  double m = 0.0;
};

struct DetConfig {
  double dt = 1e-3;
  double t_end = 40.0;
  double delta = 0.5;
  std::size_t record_every = 100;
  double m = -1.0;  // negative: use C*
  double envelope_tol = 1e-2;

  void validate() const {
    if (!(dt > 0.0)) throw DomainError("simulation.dt must be positive");
    if (!(t_end > 0.0)) throw DomainError("simulation.t_end must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("simulation.delta must lie in (0,1)");
    if (record_every == 0) throw DomainError("simulation.record_every must be positive");
  }
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> h_norms;
  std::vector<double> phases;
  std::vector<double> envelope;
  std::vector<double> c_minus_ct;
  double m = 0.0;
  double radius = 0.0;        // min(delta kappa* / (2 b eta2), 1)
  bool preconditions_ok = true;
  bool envelope_ok = true;
  double max_envelope_ratio = 0.0;
};

/// Largest admissible phase shift: keeps the front at least l_dom/2 from the boundary.
inline double max_phase_shift(const GridSpec& g) { return 0.5 * g.l_dom; }

/// B(C) = <v - v(. + C), v_x(. + C)>.
inline double phase_increment(const Field& v, const WaveProfile& w, double c_shift) {
  if (!(std::abs(c_shift) <= max_phase_shift(w.grid)))
    throw NumericalError("phase shift " + format_number(c_shift) + " leaves the admissible range");
  ShiftedWave sw(w);
  std::vector<double> vt(w.size()), vxt(w.size());
  sw.sample(c_shift, vt, vxt);
  Field d(w.grid);
  for (std::size_t i = 0; i < w.size(); ++i) d[i] = v[i] - vt[i];
  return inner(d, Field(w.grid, std::move(vxt)));
}

/// Semi-implicit step for the perturbation u = v - v(. + C): implicit
/// diffusion with zero Dirichlet ghosts, explicit reaction and phase drift,
/// explicit Euler for C. An optional additive increment enters the right-hand side.
class Stepper {
 public:
  Stepper(const WaveProfile& w, const ReactionSpec& spec, double dt)
      : w_(&w), spec_(&spec), dt_(dt), shifted_(w),
        solver_(implicit_diffusion(w.grid, w.params.nu, dt)),
        vt_(w.size()), vxt_(w.size()) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
  }

  /// Samples the shifted wave at the current phase; returns B(C).
  double prepare(const Field& u, const PhaseState& st) {
    if (!(std::abs(st.c_shift) <= max_phase_shift(w_->grid)))
      throw NumericalError("phase shift " + format_number(st.c_shift) +
                           " leaves the admissible range");
    shifted_.sample(st.c_shift, vt_, vxt_);
    const std::size_t n = u.size();
    double s = 0.5 * (u[0] * vxt_[0] + u[n - 1] * vxt_[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) s += u[i] * vxt_[i];
    return s * w_->grid.dx();
  }

  struct NoNoise {
    void operator()(std::span<const double>, std::span<const double>, std::span<double>) const {}
  };

  /// Advances (u, st) by one step. `noise(u, v_shifted, rhs)` adds its
  /// increment to the right-hand side before the implicit solve.
  template <class Noise = NoNoise>
  void step(Field& u, PhaseState& st, Noise&& noise = {}) {
    const double bphase = prepare(u, st);
    const double drift = st.m * bphase;  // dC/dt - c
    const double b = w_->params.b;
    rhs_.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double g = spec_->f(u[i] + vt_[i]) - spec_->f(vt_[i]);
      rhs_[i] = u[i] + dt_ * (b * g - drift * vxt_[i]);
    }
    noise(std::as_const(u).span(), std::span<const double>(vt_), std::span<double>(rhs_));
    solver_.solve(rhs_);
    std::copy(rhs_.begin(), rhs_.end(), u.vals.begin());
    st.c_shift += dt_ * (w_->c + drift);
    if (!std::isfinite(st.c_shift)) throw NumericalError("phase became non-finite");
  }

  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] std::span<const double> shifted_wave() const { return vt_; }
  [[nodiscard]] std::span<const double> shifted_slope() const { return vxt_; }

 private:
  const WaveProfile* w_;
  const ReactionSpec* spec_;
  double dt_;
  ShiftedWave shifted_;
  TridiagonalSolver solver_;
  std::vector<double> vt_, vxt_, rhs_;
};

/// One deterministic step; convenience wrapper that builds a fresh stepper.
inline std::pair<Field, PhaseState> det_step(const Field& u_tilde, const PhaseState& state,
                                             const WaveProfile& w, const ReactionSpec& spec,
                                             double dt) {
  Stepper s(w, spec, dt);
  Field u = u_tilde;
  PhaseState st = state;
  s.step(u, st);
  return {std::move(u), st};
}

/// Radius under which the decay envelope is guaranteed: min(delta kappa* / (2 b eta2), 1).
inline double decay_radius(const StabilityConstants& k, double b, double delta) {
  return std::min(delta * k.kappa_star / (2.0 * b * k.eta2), 1.0);
}

inline TrajectoryRecord run_deterministic(const Field& u0, const DetConfig& cfg,
                                          const StabilityConstants& consts, const WaveProfile& w,
                                          const ReactionSpec& spec) {
  cfg.validate();
  TrajectoryRecord rec;
  rec.m = cfg.m < 0.0 ? consts.C_star : cfg.m;
  rec.radius = decay_radius(consts, w.params.b, cfg.delta);
  const double norm0 = h_norm(u0);
  rec.preconditions_ok = rec.m >= consts.C_star && norm0 < rec.radius;
  const double rate = (1.0 - cfg.delta) * consts.kappa_star;

  Stepper stepper(w, spec, cfg.dt);
  Field u = u0;
  PhaseState st{0.0, rec.m};
  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  auto record = [&](std::size_t k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const double h = h_norm(u);
    const double env = std::exp(-rate * t) * norm0;
    rec.times.push_back(t);
    rec.h_norms.push_back(h);
    rec.phases.push_back(st.c_shift);
    rec.envelope.push_back(env);
    rec.c_minus_ct.push_back(st.c_shift - w.c * t);
    if (h > env * (1.0 + cfg.envelope_tol)) rec.envelope_ok = false;
    if (env > 0.0) rec.max_envelope_ratio = std::max(rec.max_envelope_ratio, h / env);
  };
  record(0);
  for (std::size_t k = 1; k <= steps; ++k) {
    stepper.step(u, st);
    if (k % cfg.record_every == 0 || k == steps) record(k);
  }
  return rec;
}

}  // namespace wavegauge
