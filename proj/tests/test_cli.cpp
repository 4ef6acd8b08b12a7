#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "csl/cli.hpp"

using namespace csl;
using namespace csl::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_with(const std::string& scenario, std::vector<std::string> overrides, Format f = Format::Csv,
                 bool dry = false, std::string config = {}) {
  ScenarioRequest r;
  r.scenario = scenario;
  r.overrides = std::move(overrides);
  r.format = f;
  r.dry_run = dry;
  r.config_path = std::move(config);
  std::ostringstream out, err;
  const int code = run(r, out, err);
  return {code, out.str(), err.str()};
}

int shell(const std::string& args) {
  const std::string cmd = std::string(CSLSIM_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const std::string& name) { return std::string(CONFIG_DIR) + "/" + name; }

}  // namespace

TEST_CASE("exit codes by error category") {
  CHECK(run_with("nope", {}).code == kExitConfig);
  CHECK(run_with("twoslit", {"sigmaa=1"}).code == kExitConfig);
  CHECK(run_with("twoslit", {"sigma=abc"}).code == kExitConfig);
  CHECK(run_with("twoslit", {"sigma=-1"}).code == kExitDomain);
  CHECK(run_with("scatter", {"D=0.2"}).code == kExitDomain);
  CHECK(run_with("oracle-check", {"n_grid=128", "dx=0.125"}).code == kExitNumerical);
  CHECK(run_with("twoslit", {"mass_amu=1e8", "sigma=1e-7", "mu=1e-7", "t=1", "D=0.1"}).code == kExitConfig);
  const auto bad = run_with("twoslit", {"sigma=-1"});
  CHECK(bad.err.rfind("error category=domain: ", 0) == 0);
  CHECK(bad.out.empty());
}

TEST_CASE("output is byte-identical across runs") {
  const std::vector<std::string> o{"n_grid=128", "dx=0.1875", "t_final=0.2", "dt=0.05", "n_traj=4", "sde_dt=0.01"};
  for (Format f : {Format::Csv, Format::Json}) {
    const auto a = run_with("oracle-check", o, f);
    const auto b = run_with("oracle-check", o, f);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
  }
  const auto a = run_with("twoslit", {"D=0,0.01", "n_points=51"});
  CHECK(a.out == run_with("twoslit", {"D=0,0.01", "n_points=51"}).out);
}

TEST_CASE("seed changes stochastic output and is recorded") {
  std::vector<std::string> o{"n_grid=128", "dx=0.1875", "t_final=0.2", "dt=0.05", "n_traj=4", "sde_dt=0.01"};
  const auto a = run_with("oracle-check", o);
  o.push_back("seed=5");
  const auto b = run_with("oracle-check", o);
  CHECK(a.out != b.out);
  CHECK(b.out.find("# seed: 5\n") != std::string::npos);
  ScenarioRequest r;
  r.scenario = "oracle-check";
  r.overrides = o;
  r.seed = 6;
  std::ostringstream out, err;
  REQUIRE(run(r, out, err) == 0);
  CHECK(out.str().find("# seed: 6\n") != std::string::npos);
}

TEST_CASE("CSV layout: header comments, units, then data") {
  const auto r = run_with("twoslit", {"D=0.001", "n_points=11"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# tool: cslsim 1.0.0\n", 0) == 0);
  CHECK(r.out.find("# summary visibility = ") != std::string::npos);
  CHECK(r.out.find("# columns: x [natural] pdf [natural]\nx,pdf\n") != std::string::npos);
  int data = 0;
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#' && line != "x,pdf") ++data;
  CHECK(data == 11);
}

TEST_CASE("JSON report carries units, warnings and data") {
  const auto r = run_with("twoparticle", {"n_grid=5"}, Format::Json);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["scenario"] == "twoparticle");
  CHECK(j["data"].size() == 25);
  CHECK(j["columns"][2]["name"] == "pdf");
  CHECK(j["summary"]["ratio"]["unit"] == "1");
  CHECK(j["warnings"].is_array());
}

TEST_CASE("validate mode reports warnings and cost without data") {
  const auto r = run_with("twoslit", {}, Format::Csv, true, config("au_cluster.conf"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# mode: validate") != std::string::npos);
  CHECK(r.out.find("# warning: ") != std::string::npos);
  CHECK(r.out.find("# cost: ") != std::string::npos);
  CHECK(r.out.find("# columns") == std::string::npos);
}

TEST_CASE("shipped configurations validate") {
  CHECK(run_with("scatter", {}, Format::Csv, true, config("scatter_barrier.conf")).code == 0);
  CHECK(run_with("twoslit", {}, Format::Csv, true, config("twoslit_sweep.conf")).code == 0);
  CHECK(run_with("twoparticle", {}, Format::Csv, true, config("twoparticle_spreads.conf")).code == 0);
  CHECK(run_with("twoparticle", {}, Format::Csv, true, config("trap_release.conf")).code == 0);
  const auto grw = run_with("twoslit", {}, Format::Csv, true, config("grw_twoslit.conf"));
  REQUIRE(grw.code == 0);
  CHECK(grw.out.find("# warning") == std::string::npos);
  CHECK(grw.out.find("[kg^2 m^2 s^-3]") != std::string::npos);
}

TEST_CASE("physical units are converted back to SI") {
  const auto r = run_with("twoslit", {}, Format::Json, true, config("au_cluster.conf"));
  const auto j = nlohmann::json::parse(r.out);
  const double v = j["summary"]["critical_D_over_hbar2"]["value"];
  CHECK(j["summary"]["critical_D_over_hbar2"]["unit"] == "m^-2 s^-1");
  CHECK(v > 1e12);
  CHECK(v < 1e15);
}

TEST_CASE("command-line tool") {
  CHECK(shell("--version") == 0);
  CHECK(shell("--scenario twoslit --set n_points=3") == 0);
  CHECK(shell("--scenario twoslit --bogus") == kExitConfig);
  CHECK(shell("--scenario twoslit --format xml") == kExitConfig);
  CHECK(shell("--scenario twoslit --config /nonexistent.conf") == kExitConfig);
  CHECK(shell("--scenario twoslit --set sigma=0") == kExitDomain);
  const auto tmp = std::filesystem::temp_directory_path() / "cslsim_test_out.csv";
  CHECK(shell("--scenario twoparticle --set n_grid=3 --out " + tmp.string()) == 0);
  std::ifstream in(tmp);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("X,xi,pdf") != std::string::npos);
  std::filesystem::remove(tmp);
}
