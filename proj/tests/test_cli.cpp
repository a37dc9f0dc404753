#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kBin = WAVEGAUGE_BIN;

int run(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + kBin + "\" " + args + " > cli_stdout.txt 2> cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json json_of(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::current_path() / ("cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  fs::path operator/(const std::string& f) const { return dir / f; }
};

}  // namespace

TEST_CASE("wave writes a profile and a sidecar") {
  const Scratch s("wave");
  REQUIRE(run("wave --set a=0.25 --set n=1024 -o " + (s / "profile.csv").string()) == 0);
  const std::string csv = slurp(s / "profile.csv");
  CHECK(csv.rfind("x,v,vx,vxx\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1025);
  const auto j = json_of(s / "profile.json");
  CHECK(std::abs(j["c"].get<double>() - 0.5) < 1e-12);
  CHECK(j.contains("landmarks"));
  CHECK(j.contains("integrals"));
}

TEST_CASE("constants JSON is reproducible byte for byte") {
  const Scratch s("constants");
  write(s / "cfg.toml", "a = 0.5\nn = 2048\n");
  REQUIRE(run("constants -c " + (s / "cfg.toml").string() + " -o " + (s / "a.json").string()) == 0);
  REQUIRE(run("constants -c " + (s / "cfg.toml").string() + " -o " + (s / "b.json").string()) == 0);
  CHECK(slurp(s / "a.json") == slurp(s / "b.json"));
  const auto j = json_of(s / "a.json");
  CHECK(std::abs(j["constants"]["kappa_star"].get<double>() - 0.25) < 1e-6);
  CHECK(std::abs(j["constants"]["c_star"].get<double>() - 1.0 / 48.0) < 1e-8);
}

TEST_CASE("verify exit codes follow the checks") {
  const Scratch s("verify");
  CHECK(run("verify --set a=0.25 -o " + (s / "ok.json").string()) == 0);
  const auto j = json_of(s / "ok.json");
  CHECK(j.contains("checks"));
  CHECK(run("verify --set a=0.7") == 1);
  write(s / "quintic.toml", "reaction = \"polynomial\"\ncoeffs = [0.0, -0.97, 7.25, -17.88, 19.6, -8.0]\n");
  CHECK(run("verify -c " + (s / "quintic.toml").string()) == 1);
  CHECK(slurp("cli_stdout.txt").find("FAIL  v* in [a,1)") != std::string::npos);
}

TEST_CASE("configuration errors exit with 2") {
  const Scratch s("errors");
  CHECK(run("verify --set a=1.5") == 2);
  CHECK(slurp("cli_stderr.txt").find("a:") != std::string::npos);
  write(s / "bad.toml", "a = 0.3\nbogus = 1\n");
  CHECK(run("constants -c " + (s / "bad.toml").string()) == 2);
  CHECK(slurp("cli_stderr.txt").find("line 2") != std::string::npos);
  CHECK(run("constants -c " + (s / "missing.toml").string()) == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("simulate --mode sideways") == 2);
  CHECK(run("constants", "WAVEGAUGE_THREADS=zero") == 2);
}

TEST_CASE("deterministic simulation writes its series") {
  const Scratch s("det");
  const std::string out = (s / "traj.csv").string();
  REQUIRE(run("simulate --mode det --set a=0.5 --set n=1024 --set simulation.dt=0.005 --set simulation.t_end=10 "
              "--set simulation.u0_norm=0.015 -o " + out) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("t,h_norm,envelope,C,C_minus_ct\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 10);
}

TEST_CASE("numerical blow-up exits with 3") {
  CHECK(run("simulate --mode det --set a=0.5 --set n=256 --set simulation.dt=50 --set simulation.t_end=5000 "
            "--set simulation.u0_norm=100") == 3);
}

TEST_CASE("mc-exit is reproducible and honours the thread settings") {
  const Scratch s("mc");
  write(s / "mc.toml",
        "a = 0.5\nl_dom = 16\nn = 256\n[noise]\nhs_target = 1e-4\n"
        "[simulation]\ndt = 0.01\nt_max = 5\ntrials = 8\nseed = 11\n");
  const std::string cfg = (s / "mc.toml").string();
  REQUIRE(run("mc-exit -c " + cfg + " --threads 1 -o " + (s / "a.json").string() + " --paths " +
              (s / "paths").string()) == 0);
  REQUIRE(run("mc-exit -c " + cfg + " -o " + (s / "b.json").string(), "WAVEGAUGE_THREADS=2") == 0);
  auto a = json_of(s / "a.json"), b = json_of(s / "b.json");
  CHECK(a.contains("runtime_seconds"));
  a.erase("runtime_seconds");
  b.erase("runtime_seconds");
  CHECK(a.dump() == b.dump());
  CHECK(a["trials"].get<int>() == 8);
  CHECK(a["certification"].get<std::string>() == "passed");
  CHECK(fs::exists(s / "paths" / "trial_000000.csv"));
  CHECK(fs::exists(s / "paths" / "trial_000007.csv"));
}
