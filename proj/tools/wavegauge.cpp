#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavegauge/wavegauge.hpp"

namespace wg = wavegauge;
using json = nlohmann::ordered_json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_out = true) {
  cmd->add_option("-c,--config", o.config_path, "TOML configuration file");
  cmd->add_option("--set", o.overrides, "Override a config key, e.g. --set noise.amp=0.01")
      ->allow_extra_args(false);
  if (with_out) cmd->add_option("-o,--out", o.out, "Output file");
  cmd->add_option("--threads", o.threads, "Worker threads for Monte Carlo runs")
      ->check(CLI::PositiveNumber);
}

wg::RunConfig load(const CommonOptions& o) {
  wg::RunConfig cfg = wg::parse_config(o.config_path, o.overrides);
  if (o.threads) {
    cfg.threads = *o.threads;
  } else if (const char* env = std::getenv("WAVEGAUGE_THREADS"); env && *env) {
    char* end = nullptr;
    const long long t = std::strtoll(env, &end, 10);
    if (*end != '\0' || t < 1) throw wg::DomainError("WAVEGAUGE_THREADS: expected a positive integer");
    cfg.threads = static_cast<std::size_t>(t);
  }
  if (!o.out.empty()) cfg.out = o.out;
  return cfg;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw wg::DomainError("cannot open output file '" + path + "'");
  return f;
}

void emit_json(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  auto f = open_out(path);
  f << j.dump(2) << "\n";
}

json reaction_json(const wg::RunConfig& cfg, const wg::ReactionSpec& spec) {
  json j;
  j["name"] = cfg.reaction;
  if (cfg.reaction == "nagumo") j["a"] = cfg.a;
  else j["coeffs"] = cfg.coeffs;
  j["zero_a"] = spec.a();
  j["v_star"] = spec.v_star();
  j["eta"] = spec.eta();
  j["eta1"] = spec.eta1();
  j["eta2"] = spec.eta2();
  j["lip_l"] = spec.lip_l();
  return j;
}

json provenance_json(const wg::RunConfig& cfg) {
  const wg::GridSpec g = cfg.grid();
  json j;
  j["nu"] = cfg.nu;
  j["b"] = cfg.b;
  j["n"] = g.n;
  j["l_dom"] = g.l_dom;
  j["dx"] = g.dx();
  j["solver"] = cfg.solver == wg::WaveSolver::shooting      ? "shooting"
                : cfg.solver == wg::WaveSolver::closed_form ? "closed_form"
                                                            : "auto";
  j["tolerance"] = {{"abs", cfg.tol.abs}, {"rel", cfg.tol.rel}, {"profile", cfg.profile_tol}};
  return j;
}

json constants_json(const wg::StabilityConstants& k) {
  return json{{"kappa", k.kappa},         {"gamma_minus", k.gamma_minus}, {"gamma_plus", k.gamma_plus},
              {"Z", k.Z},                 {"Zhalf", k.Zhalf},             {"C_prop", k.C_prop},
              {"q1", k.q1},               {"q2", k.q2},                   {"kappa_star", k.kappa_star},
              {"C_star", k.C_star},       {"c_star", k.c_star},           {"beta", k.beta},
              {"eta", k.eta},             {"eta2", k.eta2}};
}

json report_json(const wg::ValidationReport& rep) {
  json arr = json::array();
  for (const auto& c : rep.checks()) {
    json e{{"name", c.name}, {"passed", c.passed}};
    e["witness"] = c.witness ? json(*c.witness) : json(nullptr);
    e["detail"] = c.detail;
    arr.push_back(e);
  }
  return arr;
}

std::string sidecar_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.extension() == ".csv") return p.replace_extension(".json").string();
  return out + ".json";
}

int cmd_wave(const wg::RunConfig& cfg) {
  const wg::ReactionSpec spec = wg::make_reaction(cfg);
  const wg::WaveProfile w = wg::build_wave(cfg, spec);
  const wg::WaveIntegrals ints = wg::weighted_integrals(w);
  const std::string out = cfg.out.empty() ? "profile.csv" : cfg.out;
  {
    auto f = open_out(out);
    f << "x,v,vx,vxx\n";
    for (std::size_t i = 0; i < w.size(); ++i)
      f << fmt17(w.x[i]) << ',' << fmt17(w.v[i]) << ',' << fmt17(w.vx[i]) << ',' << fmt17(w.vxx[i]) << '\n';
  }
  json j;
  j["reaction"] = reaction_json(cfg, spec);
  j["grid"] = provenance_json(cfg);
  j["c"] = w.c;
  j["closed_form"] = w.logistic_k.has_value();
  j["tail_rates"] = {{"left", w.tails.left}, {"right", w.tails.right}};
  json xa = json::object();
  for (const auto& [alpha, x] : w.landmarks.x_alpha) xa[fmt17(alpha)] = x;
  j["landmarks"] = {{"x0", w.landmarks.x0}, {"x1", w.landmarks.x1}, {"x_star", w.landmarks.x_star}, {"x_alpha", xa}};
  j["integrals"] = {{"Z", ints.Z}, {"Zhalf", ints.Zhalf}, {"norm_vx_sq", ints.norm_vx_sq}, {"norm_vxx_sq", ints.norm_vxx_sq}};
  j["residual"] = wg::profile_residual(w);
  emit_json(j, sidecar_path(out));
  std::cout << "wave speed c = " << fmt17(w.c) << "\nprofile: " << out << "\nsidecar: " << sidecar_path(out) << "\n";
  return 0;
}

int cmd_constants(const wg::RunConfig& cfg) {
  const wg::Pipeline p = wg::build_pipeline(cfg);
  json j;
  j["constants"] = constants_json(p.constants);
  j["kappa_inf"] = {{"kappa", p.kappa.kappa},
                    {"grid_min", p.kappa.grid_min},
                    {"x_argmin", p.kappa.x_argmin},
                    {"phi_minus_inf", p.kappa.phi_minus_inf},
                    {"phi_plus_inf", p.kappa.phi_plus_inf}};
  j["c"] = p.wave.c;
  j["reaction"] = reaction_json(cfg, p.spec);
  j["provenance"] = provenance_json(cfg);
  emit_json(j, cfg.out);
  return 0;
}

int cmd_verify(const wg::RunConfig& cfg) {
  const wg::VerifyResult r = wg::run_verify(cfg);
  std::size_t failed = 0;
  for (const auto& c : r.report.checks()) {
    if (!c.passed) ++failed;
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name;
    if (!c.passed && c.witness) std::cout << "  [at " << wg::format_number(*c.witness) << "]";
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
  }
  if (!r.assumptions_ok) std::cout << "reaction assumptions failed; wave-dependent checks skipped\n";
  if (r.gammas)
    std::cout << "gamma- = " << wg::format_number(r.gammas->minus) << ", gamma+ = " << wg::format_number(r.gammas->plus)
              << "\n";
  if (r.constants) {
    const auto& k = *r.constants;
    std::cout << "kappa = " << wg::format_number(k.kappa) << ", kappa* = " << wg::format_number(k.kappa_star)
              << ", C* = " << wg::format_number(k.C_star) << ", c* = " << wg::format_number(k.c_star) << "\n";
  }
  std::cout << r.report.checks().size() - failed << "/" << r.report.checks().size() << " checks passed\n";

  if (!cfg.out.empty()) {
    json j;
    j["passed"] = r.report.all_passed();
    j["checks"] = report_json(r.report);
    j["c"] = r.wave_speed ? json(*r.wave_speed) : json(nullptr);
    if (r.gammas) j["gammas"] = {{"minus", r.gammas->minus}, {"plus", r.gammas->plus}};
    if (r.constants) j["constants"] = constants_json(*r.constants);
    j["provenance"] = provenance_json(cfg);
    j["seed"] = cfg.seed;
    emit_json(j, cfg.out);
  }
  return r.exit_code();
}

int cmd_simulate(const wg::RunConfig& cfg, const std::string& mode) {
  const wg::Pipeline p = wg::build_pipeline(cfg);
  const wg::Field u0 = wg::initial_perturbation(cfg, p.wave);
  const std::string out = cfg.out.empty() ? "traj.csv" : cfg.out;
  if (mode == "det") {
    const wg::TrajectoryRecord rec = wg::run_deterministic(u0, wg::det_config(cfg), p.constants, p.wave, p.spec);
    auto f = open_out(out);
    f << "t,h_norm,envelope,C,C_minus_ct\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i)
      f << fmt17(rec.times[i]) << ',' << fmt17(rec.h_norms[i]) << ',' << fmt17(rec.envelope[i]) << ','
        << fmt17(rec.phases[i]) << ',' << fmt17(rec.c_minus_ct[i]) << '\n';
    std::cout << "m = " << wg::format_number(rec.m) << ", radius = " << wg::format_number(rec.radius)
              << ", |u0| = " << wg::format_number(rec.h_norms.front()) << "\n";
    std::cout << "final |u| = " << wg::format_number(rec.h_norms.back())
              << ", C - ct = " << wg::format_number(rec.c_minus_ct.back()) << "\n";
    if (!rec.preconditions_ok) {
      std::cout << "decay preconditions (m >= C*, |u0| < radius) not met; envelope not certified\n";
      return 0;
    }
    std::cout << "envelope " << (rec.envelope_ok ? "holds" : "VIOLATED") << " (max ratio "
              << wg::format_number(rec.max_envelope_ratio) << ")\n";
    return rec.envelope_ok ? 0 : 1;
  }
  if (mode != "stoch") throw wg::DomainError("--mode: expected det or stoch");
  const wg::NoiseModel model = wg::build_noise_model(cfg, p.wave);
  const wg::SpdeConfig sc = wg::spde_config(cfg);
  const wg::TrialResult tr = wg::run_trial(u0, sc, p.constants, p.wave, p.spec, model, cfg.seed);
  auto f = open_out(out);
  f << "t,h_norm,C,C_minus_ct\n";
  for (std::size_t i = 0; i < tr.path_times.size(); ++i)
    f << fmt17(tr.path_times[i]) << ',' << fmt17(tr.path_norms[i]) << ',' << fmt17(tr.path_phases[i]) << ','
      << fmt17(tr.path_phases[i] - p.wave.c * tr.path_times[i]) << '\n';
  std::cout << "noise amp = " << wg::format_number(model.amp) << ", exited = " << (tr.exited ? "yes" : "no");
  if (tr.t_exit) std::cout << " at t = " << wg::format_number(*tr.t_exit);
  std::cout << "\n";
  return 0;
}

int cmd_mc_exit(const wg::RunConfig& cfg, const std::string& paths_dir) {
  const auto start = std::chrono::steady_clock::now();
  const wg::Pipeline p = wg::build_pipeline(cfg);
  const wg::Field u0 = wg::initial_perturbation(cfg, p.wave);
  const wg::NoiseModel model = wg::build_noise_model(cfg, p.wave);
  wg::SpdeConfig sc = wg::spde_config(cfg);
  const std::string dir = paths_dir.empty() ? cfg.paths_dir : paths_dir;
  const bool keep = !dir.empty();
  if (!keep) sc.record_every = 0;
  const wg::ExitStats st = wg::mc_exit(u0, sc, p.constants, p.wave, p.spec, model, keep);

  if (keep) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < st.trial_results.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "trial_%06zu.csv", i);
      auto f = open_out((std::filesystem::path(dir) / name).string());
      f << "t,h_norm\n";
      const auto& r = st.trial_results[i];
      for (std::size_t k = 0; k < r.path_times.size(); ++k)
        f << fmt17(r.path_times[k]) << ',' << fmt17(r.path_norms[k]) << '\n';
    }
  }

  const bool attempted = st.hypothesis_ok;
  const bool pass = !attempted || (st.certified && st.moment_ok);
  json j;
  j["exits"] = st.exits;
  j["trials"] = st.trials;
  j["p_hat"] = st.p_hat;
  j["ci_low"] = st.ci_low;
  j["ci_high"] = st.ci_high;
  j["bound"] = st.bound;
  j["certified"] = st.certified;
  j["certification"] = attempted ? (st.certified ? "passed" : "failed") : "withheld";
  j["hypotheses"] = {{"lipschitz_sq", st.l_sigma * st.l_sigma},
                     {"lipschitz_sq_limit", p.constants.kappa_star / 4.0},
                     {"lipschitz_ok", st.lipschitz_ok},
                     {"m", st.m},
                     {"m_ok", st.gain_ok},
                     {"dispersion_certifiable", model.certifiable()},
                     {"all_ok", st.hypothesis_ok}};
  j["moment_check"] = {{"bound", st.moment_bound},
                       {"ok", st.moment_ok},
                       {"times", st.moment_times},
                       {"mean", st.moment_mean},
                       {"standard_error", st.moment_se}};
  j["noise"] = {{"kind", cfg.noise_kind == wg::NoiseKind::white ? "white" : "gaussian_kernel"},
                {"sigma", cfg.noise_sigma == wg::SigmaKind::nagumo_shape ? "vv1m" : "constant"},
                {"amp", model.amp},
                {"corr_len", cfg.noise_corr_len},
                {"hs_norm_sq", st.hs_sq}};
  j["simulation"] = {{"dt", sc.dt}, {"t_max", st.t_max}, {"u0_norm", wg::h_norm(u0)}};
  j["seeds"] = {{"base", cfg.seed}, {"first", cfg.seed}, {"last", cfg.seed + cfg.trials - 1}};
  j["constants"] = constants_json(p.constants);
  j["c"] = p.wave.c;
  j["reaction"] = reaction_json(cfg, p.spec);
  j["provenance"] = provenance_json(cfg);
  j["runtime_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit_json(j, cfg.out);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavegauge: travelling-wave stability constants, verification and simulation"};
  app.require_subcommand(1);
  CommonOptions o;
  std::string mode = "det";
  std::string paths_dir;

  auto* wave = app.add_subcommand("wave", "Compute the wave profile (CSV) and its JSON sidecar");
  add_common(wave, o);
  auto* constants = app.add_subcommand("constants", "Compute the stability constants (JSON)");
  add_common(constants, o);
  auto* verify = app.add_subcommand("verify", "Run the assumption and inequality suite");
  add_common(verify, o);
  auto* simulate = app.add_subcommand("simulate", "Simulate one deterministic or stochastic trajectory");
  add_common(simulate, o);
  simulate->add_option("--mode", mode, "det or stoch")->check(CLI::IsMember({"det", "stoch"}));
  auto* mc = app.add_subcommand("mc-exit", "Monte Carlo exit probability against its bound");
  add_common(mc, o);
  mc->add_option("--paths", paths_dir, "Directory for per-trial norm series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const wg::RunConfig cfg = load(o);
    if (wave->parsed()) return cmd_wave(cfg);
    if (constants->parsed()) return cmd_constants(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg, mode);
    if (mc->parsed()) return cmd_mc_exit(cfg, paths_dir);
  } catch (const wg::DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const wg::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
