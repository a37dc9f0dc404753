#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wavegauge/config.hpp"
#include "wavegauge/constants.hpp"
#include "wavegauge/core.hpp"
#include "wavegauge/noise.hpp"
#include "wavegauge/pipeline.hpp"

namespace wavegauge {

struct VerifyResult {
  ValidationReport report;
  bool assumptions_ok = false;
  std::optional<double> wave_speed;
  std::optional<KappaInf> kappa;
  std::optional<Gammas> gammas;
  std::optional<StabilityConstants> constants;

  [[nodiscard]] int exit_code() const { return report.all_passed() ? 0 : 1; }
};

namespace verify_detail {

struct Battery {
  std::size_t failures = 0;
  std::size_t count = 0;
  double worst = 0.0;  // max lhs - rhs over samples, normalised by |rhs|

  void record(const InequalityResult& r) {
    ++count;
    if (!r.pass) ++failures;
    const double excess = (r.lhs - r.rhs) / std::max(std::abs(r.rhs), 1e-300);
    worst = count == 1 ? excess : std::max(worst, excess);
  }

  void report_to(ValidationReport& rep, const std::string& name) const {
    rep.add(name, failures == 0, std::nullopt,
            std::to_string(failures) + "/" + std::to_string(count) +
                " failures, max (lhs-rhs)/|rhs| = " + format_number(worst));
  }
};

}  // namespace verify_detail

/// The full inequality suite. Reaction assumptions come first; when they fail
/// the wave is not built and the remaining checks are skipped.
inline VerifyResult run_verify(const RunConfig& cfg) {
  VerifyResult out;
  const ReactionSpec spec = make_reaction(cfg);
  out.report.merge(validate_assumptions(spec, cfg.assumption_samples));
  out.assumptions_ok = out.report.all_passed();
  if (!out.assumptions_ok) return out;

  const WaveProfile w = build_wave(cfg, spec);
  out.wave_speed = w.c;
  out.report.merge(verify_profile_bounds(w, spec, cfg.tol));
  out.gammas = gamma_closed_form(spec, w);

  KappaInf ki;
  try {
    ki = kappa_inf(w, spec);
  } catch (const NumericalError& e) {
    out.report.add("kappa > 0 (grid and tail limits)", false, std::nullopt, e.what());
    return out;
  }
  out.kappa = ki;
  out.report.add("kappa > 0 (grid and tail limits)", true, ki.x_argmin,
                 "kappa=" + format_number(ki.kappa) + " grid min=" + format_number(ki.grid_min) +
                     " Phi(-inf)=" + format_number(ki.phi_minus_inf) +
                     " Phi(+inf)=" + format_number(ki.phi_plus_inf));
  out.report.merge(g2_scan(w, spec));

  const WeightProfile wp = weight_profile(w, ki.kappa, cfg.tol);
  out.report.merge(wp.report);
  const WaveIntegrals ints = weighted_integrals(w);

  TestFunctionSource src(w.grid, cfg.seed);
  verify_detail::Battery hardy, poincare, master;
  for (std::size_t i = 0; i < cfg.hardy_samples; ++i)
    hardy.record(hardy_verify(wp, wp.kappa0, src.fourier_vanishing_at(wp.x_half), cfg.tol.rel));
  hardy.report_to(out.report, "weighted Hardy inequality");
  for (std::size_t i = 0; i < cfg.poincare_samples; ++i)
    poincare.record(poincare_verify(wp, ints.Z, src.fourier(), cfg.tol));
  poincare.report_to(out.report, "weighted Poincare inequality");

  out.report.merge(comparison_g(wp, w, spec, ints, cfg.tol).report);

  const StabilityConstants k = compute_constants(w, spec, ints, ki.kappa);
  out.constants = k;
  for (std::size_t i = 0; i < cfg.master_samples; ++i)
    master.record(master_inequality(w, spec, k, src.compact(), cfg.tol));
  master.report_to(out.report, "master inequality <Lu,u> <= -kappa* |u|_V^2 + C* <u,vx>^2");

  const NoiseModel unit =
      build_noise(cfg.noise_kind, cfg.noise_sigma, 1.0, w.grid, cfg.noise_corr_len);
  out.report.merge(translation_check(unit, w, {-cfg.translation_shift, cfg.translation_shift},
                                     cfg.translation_tol));
  return out;
}

}  // namespace wavegauge
