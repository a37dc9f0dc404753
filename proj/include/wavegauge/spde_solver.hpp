#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "wavegauge/constants.hpp"
#include "wavegauge/core.hpp"
#include "wavegauge/det_solver.hpp"
#include "wavegauge/grid.hpp"
#include "wavegauge/noise.hpp"
#include "wavegauge/wave.hpp"

namespace wavegauge {

struct SpdeConfig {
  double dt = 1e-3;
  double t_max = 0.0;  // <= 0: 20 / kappa*
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  double m = -1.0;  // negative: use C*
  std::size_t threads = 1;
  std::size_t record_every = 0;  // 0: no path record
  std::size_t moment_samples = 8;

  void validate() const {
    if (!(dt > 0.0)) throw DomainError("simulation.dt must be positive");
    if (trials < 1) throw DomainError("simulation.trials must be >= 1");
    if (threads < 1) throw DomainError("threads must be >= 1");
  }
};

/// One Euler-Maruyama step: the deterministic semi-implicit update plus
/// amp sigma(u + v) dW in the right-hand side. With amp = 0 no noise is drawn
/// and the arithmetic is that of the deterministic step.
inline void spde_step(Stepper& stepper, Field& u, PhaseState& st, const NoiseModel& model,
                      const NoiseStream& rng, std::uint64_t step_index) {
  if (model.is_zero()) {
    stepper.step(u, st);
    return;
  }
  stepper.step(u, st, [&](std::span<const double> uu, std::span<const double> vt,
                          std::span<double> rhs) {
    const Field dw = sample_increment(model, rng, step_index, stepper.dt());
    for (std::size_t i = 0; i < rhs.size(); ++i)
      rhs[i] += model.amp * model.sigma(uu[i] + vt[i]) * dw[i];
  });
}

struct TrialResult {
  bool exited = false;
  std::optional<double> t_exit;
  std::vector<double> sample_sq_norms;  // |u(t_k ^ T)|^2 at the moment times
  std::vector<double> path_times;
  std::vector<double> path_norms;
  std::vector<double> path_phases;
};

/// Geometrically spaced sampling times in (0, t_max], rounded to step indices.
inline std::vector<std::size_t> moment_steps(double t_max, double dt, std::size_t count) {
  const auto total = static_cast<std::size_t>(std::llround(t_max / dt));
  std::vector<std::size_t> steps;
  if (count == 0 || total == 0) return steps;
  const double first = std::max(1.0, static_cast<double>(total) / std::pow(2.0, count - 1.0));
  for (std::size_t k = 0; k < count; ++k) {
    const double frac = count == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    const double s = first * std::pow(static_cast<double>(total) / first, frac);
    steps.push_back(std::min(total, std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s)))));
  }
  return steps;
}

/// Steps until |u|_H > c* (exit) or t >= t_max.
inline TrialResult run_trial(const Field& u0, const SpdeConfig& cfg,
                             const StabilityConstants& consts, const WaveProfile& w,
                             const ReactionSpec& spec, const NoiseModel& model,
                             std::uint64_t trial_seed) {
  const double t_max = cfg.t_max > 0.0 ? cfg.t_max : 20.0 / consts.kappa_star;
  const double m = cfg.m < 0.0 ? consts.C_star : cfg.m;
  if (h_norm(u0) > consts.c_star) throw DomainError("run_trial: initial perturbation exceeds c*");
  const auto total = static_cast<std::size_t>(std::llround(t_max / cfg.dt));
  const std::vector<std::size_t> samples = moment_steps(t_max, cfg.dt, cfg.moment_samples);

  Stepper stepper(w, spec, cfg.dt);
  const NoiseStream rng(trial_seed);
  Field u = u0;
  PhaseState st{0.0, m};
  TrialResult res;
  std::size_t next_sample = 0;
  double last_sq = h_norm(u) * h_norm(u);
  if (cfg.record_every > 0) {
    res.path_times.push_back(0.0);
    res.path_norms.push_back(std::sqrt(last_sq));
    res.path_phases.push_back(st.c_shift);
  }
  for (std::size_t k = 1; k <= total; ++k) {
    spde_step(stepper, u, st, model, rng, k);
    const double hn = h_norm(u);
    last_sq = hn * hn;
    if (cfg.record_every > 0 && k % cfg.record_every == 0) {
      res.path_times.push_back(static_cast<double>(k) * cfg.dt);
      res.path_norms.push_back(hn);
      res.path_phases.push_back(st.c_shift);
    }
    while (next_sample < samples.size() && samples[next_sample] == k) {
      res.sample_sq_norms.push_back(last_sq);
      ++next_sample;
    }
    if (!std::isfinite(hn)) throw NumericalError("run_trial: perturbation became non-finite");
    if (hn > consts.c_star) {
      res.exited = true;
      res.t_exit = static_cast<double>(k) * cfg.dt;
      if (cfg.record_every > 0 && k % cfg.record_every != 0) {
        res.path_times.push_back(static_cast<double>(k) * cfg.dt);
        res.path_norms.push_back(hn);
        res.path_phases.push_back(st.c_shift);
      }
      break;
    }
  }
  // stopped paths keep their exit value at later sampling times
  while (res.sample_sq_norms.size() < samples.size()) res.sample_sq_norms.push_back(last_sq);
  return res;
}

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval at 95%.
inline WilsonInterval wilson95(std::size_t successes, std::size_t n) {
  constexpr double z = 1.959963984540054;
  if (n == 0) return {};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  const double low = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double high = successes == n ? 1.0 : std::min(1.0, centre + half);
  return {low, high};
}

struct ExitStats {
  std::size_t exits = 0;
  std::size_t trials = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bound = 0.0;  // (|u0|^2 + (4/kappa*) HS^2) / c*^2
  double hs_sq = 0.0;
  double l_sigma = 0.0;
  double t_max = 0.0;
  double m = 0.0;
  bool lipschitz_ok = false;   // L_sigma^2 <= kappa*/4
  bool gain_ok = false;        // m >= C*
  bool hypothesis_ok = false;  // both of the above and a certifiable dispersion
  bool certified = false;
  std::vector<double> moment_times;
  std::vector<double> moment_mean;
  std::vector<double> moment_se;
  double moment_bound = 0.0;
  bool moment_ok = true;
  std::vector<TrialResult> trial_results;  // filled only when paths are requested
};

/// Runs cfg.trials independent trials with seeds seed + i on cfg.threads
/// workers. Results are reduced in trial order, so the statistics do not
/// depend on the worker count.
inline ExitStats mc_exit(const Field& u0, const SpdeConfig& cfg, const StabilityConstants& consts,
                         const WaveProfile& w, const ReactionSpec& spec, const NoiseModel& model,
                         bool keep_paths = false) {
  cfg.validate();
  ExitStats st;
  st.trials = cfg.trials;
  st.t_max = cfg.t_max > 0.0 ? cfg.t_max : 20.0 / consts.kappa_star;
  st.hs_sq = hs_norm_sq(model, Field(w.grid, w.v));
  st.l_sigma = model.l_sigma;
  const double u0_sq = h_norm(u0) * h_norm(u0);
  st.bound = (u0_sq + 4.0 / consts.kappa_star * st.hs_sq) / (consts.c_star * consts.c_star);
  st.moment_bound = u0_sq + 4.0 / consts.kappa_star * st.hs_sq;
  st.m = cfg.m < 0.0 ? consts.C_star : cfg.m;
  st.lipschitz_ok = st.l_sigma * st.l_sigma <= consts.kappa_star / 4.0;
  st.gain_ok = st.m >= consts.C_star;
  st.hypothesis_ok = model.certifiable() && st.lipschitz_ok && st.gain_ok;

  std::vector<TrialResult> results(cfg.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.trials) return;
      try {
        results[i] = run_trial(u0, cfg, consts, w, spec, model, cfg.seed + i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(cfg.trials);
        return;
      }
    }
  };
  const std::size_t nthreads = std::min(cfg.threads, cfg.trials);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  const auto steps = moment_steps(st.t_max, cfg.dt, cfg.moment_samples);
  const std::size_t ns = steps.size();
  std::vector<double> sum(ns, 0.0), sum_sq(ns, 0.0);
  for (const auto& r : results) {
    if (r.exited) ++st.exits;
    for (std::size_t k = 0; k < ns; ++k) {
      sum[k] += r.sample_sq_norms[k];
      sum_sq[k] += r.sample_sq_norms[k] * r.sample_sq_norms[k];
    }
  }
  const double nt = static_cast<double>(cfg.trials);
  st.p_hat = static_cast<double>(st.exits) / nt;
  const WilsonInterval ci = wilson95(st.exits, cfg.trials);
  st.ci_low = ci.low;
  st.ci_high = ci.high;
  for (std::size_t k = 0; k < ns; ++k) {
    const double mean = sum[k] / nt;
    const double var = cfg.trials > 1 ? std::max(0.0, (sum_sq[k] - nt * mean * mean) / (nt - 1.0)) : 0.0;
    const double se = std::sqrt(var / nt);
    st.moment_times.push_back(static_cast<double>(steps[k]) * cfg.dt);
    st.moment_mean.push_back(mean);
    st.moment_se.push_back(se);
    if (mean - 3.0 * se > st.moment_bound) st.moment_ok = false;
  }
  st.certified = st.hypothesis_ok && st.ci_low <= st.bound;
  if (keep_paths) st.trial_results = std::move(results);
  return st;
}

}  // namespace wavegauge
