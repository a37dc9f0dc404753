#pragma once

#include <cmath>
#include <optional>

#include "wavegauge/config.hpp"
#include "wavegauge/constants.hpp"
#include "wavegauge/det_solver.hpp"
#include "wavegauge/grid.hpp"
#include "wavegauge/noise.hpp"
#include "wavegauge/reaction.hpp"
#include "wavegauge/spde_solver.hpp"
#include "wavegauge/wave.hpp"

namespace wavegauge {

/// Closed form for Nagumo reactions with a <= 1/2 (unless shooting is forced), shooting otherwise.
inline WaveProfile build_wave(const RunConfig& cfg, const ReactionSpec& spec) {
  const GridSpec grid = cfg.grid();
  const WaveParams params = cfg.wave_params();
  const bool nagumo = cfg.reaction == "nagumo";
  if (cfg.solver == WaveSolver::closed_form) {
    if (!nagumo) throw DomainError("solver: closed_form requires reaction = \"nagumo\"");
    return nagumo_profile(params, cfg.a, grid);
  }
  if (cfg.solver == WaveSolver::automatic && nagumo && cfg.a <= 0.5)
    return nagumo_profile(params, cfg.a, grid);
  return solve_profile(spec, params, grid, cfg.profile_tol);
}

/// Everything downstream of the reaction: wave, integrals, kappa and constants.
struct Pipeline {
  ReactionSpec spec;
  WaveProfile wave;
  WaveIntegrals integrals;
  KappaInf kappa;
  StabilityConstants constants;
};

inline Pipeline build_pipeline(const RunConfig& cfg) {
  ReactionSpec spec = make_reaction(cfg);
  WaveProfile w = build_wave(cfg, spec);
  const WaveIntegrals ints = weighted_integrals(w);
  const KappaInf ki = kappa_inf(w, spec);
  const StabilityConstants k = compute_constants(w, spec, ints, ki.kappa);
  return Pipeline{std::move(spec), std::move(w), ints, ki, k};
}

/// Noise model of the config. A set `noise.hs_target` fixes the amplitude
/// through hs_norm_sq(v) = target and overrides `noise.amp`.
inline NoiseModel build_noise_model(const RunConfig& cfg, const WaveProfile& w) {
  const Field v(w.grid, w.v);
  double amp = cfg.noise_amp;
  if (cfg.noise_hs_target) {
    if (*cfg.noise_hs_target == 0.0) {
      amp = 0.0;
    } else {
      const NoiseModel unit = build_noise(cfg.noise_kind, cfg.noise_sigma, 1.0, w.grid, cfg.noise_corr_len);
      amp = amplitude_for_hs(unit, v, *cfg.noise_hs_target);
    }
  }
  return build_noise(cfg.noise_kind, cfg.noise_sigma, amp, w.grid, cfg.noise_corr_len);
}

/// Initial perturbation: a Gaussian bump exp(-(x/width)^2) scaled to the H-norm
/// u0_norm, the shift v(. + u0_shift) - v, or zero.
inline Field initial_perturbation(const RunConfig& cfg, const WaveProfile& w) {
  switch (cfg.u0) {
    case InitialKind::zero:
      return Field(w.grid);
    case InitialKind::shift:
      return Field::sample(w.grid, [&](double x) { return w.eval(x + cfg.u0_shift).v - w.eval(x).v; });
    case InitialKind::bump:
    default: {
      Field u = Field::sample(w.grid, [&](double x) {
        const double z = x / cfg.u0_width;
        return std::exp(-z * z);
      });
      const double s = cfg.u0_norm / h_norm(u);
      for (double& x : u.vals) x *= s;
      return u;
    }
  }
}

inline DetConfig det_config(const RunConfig& cfg) {
  DetConfig d;
  d.dt = cfg.dt;
  d.t_end = cfg.t_end;
  d.delta = cfg.delta;
  d.record_every = cfg.record_every;
  d.m = cfg.m ? *cfg.m : -1.0;
  d.envelope_tol = cfg.envelope_tol;
  return d;
}

inline SpdeConfig spde_config(const RunConfig& cfg) {
  SpdeConfig s;
  s.dt = cfg.dt;
  s.t_max = cfg.t_max;
  s.trials = cfg.trials;
  s.seed = cfg.seed;
  s.m = cfg.m ? *cfg.m : -1.0;
  s.threads = resolve_threads(cfg.threads);
  s.record_every = cfg.record_every;
  return s;
}

}  // namespace wavegauge
