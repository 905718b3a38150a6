#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "support.hpp"

namespace {

const std::string kCli = CMSGD_CLI_PATH;

int run_cli(const std::string& args, const test::TempDir& dir) {
  const std::string cmd = "\"" + kCli + "\" " + args + " > \"" + (dir.path / "stdout.txt").string() +
                          "\" 2> \"" + (dir.path / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string write_config(const test::TempDir& dir, const std::string& name, const std::string& text) {
  const auto p = dir.path / name;
  std::ofstream(p) << text;
  return "\"" + p.string() + "\"";
}

const char* kSmall = R"(
n = 4
objective = quadratic
d = 4
eta = 0.005
T = 20
metric_every = 5
seeds = 1,2
)";

}  // namespace

TEST_CASE("run") {
  test::TempDir dir("cli_run");
  const auto cfg = write_config(dir, "small.cfg", kSmall);
  const auto out = (dir.path / "out").string();
  CHECK(run_cli("run --config " + cfg + " --out \"" + out + "\"", dir) == 0);
  CHECK(std::filesystem::exists(dir.path / "out" / "seed_2.csv"));
  CHECK(std::filesystem::exists(dir.path / "out" / "aggregate.csv"));
  CHECK(run_cli("run --config " + cfg + " --seed 9 --out \"" + out + "9\"", dir) == 0);
  CHECK(std::filesystem::exists(dir.path / "out9" / "seed_9.csv"));
  CHECK_FALSE(std::filesystem::exists(dir.path / "out9" / "seed_1.csv"));
}

TEST_CASE("every seed diverging exits 2") {
  test::TempDir dir("cli_diverge");
  const auto cfg = write_config(dir, "bad.cfg", std::string(kSmall) +
                                                    "x0 = normal\neta = 5\nbeta = 0\nT = 200\n"
                                                    "divergence_cap = 1000\n");
  CHECK(run_cli("run --config " + cfg + " --out \"" + (dir.path / "o").string() + "\"", dir) == 2);
  CHECK(test::read_file(dir.path / "stderr.txt").find("diverged") != std::string::npos);
}

TEST_CASE("configuration errors exit 1") {
  test::TempDir dir("cli_errors");
  const auto cfg = write_config(dir, "unknown.cfg", "n = 4\nwibble = 2\n");
  CHECK(run_cli("run --config " + cfg, dir) == 1);
  CHECK(test::read_file(dir.path / "stderr.txt").find("wibble") != std::string::npos);
  CHECK(run_cli("run --config /nonexistent/x.cfg", dir) == 1);
  CHECK(run_cli("frobnicate", dir) == 1);
  CHECK(run_cli("run", dir) == 1);
  const auto disconnected = write_config(dir, "disc.cfg", "n = 3\nedges = 0-1\n");
  CHECK(run_cli("run --config " + disconnected, dir) == 1);
  CHECK(run_cli("--help", dir) == 0);
}

TEST_CASE("sweep") {
  test::TempDir dir("cli_sweep");
  const auto cfg = write_config(dir, "small.cfg", kSmall);
  const auto out = "\"" + (dir.path / "sw").string() + "\"";
  CHECK(run_cli("sweep --config " + cfg + " --param gamma_g --values 0.5,1 --out " + out, dir) == 0);
  CHECK(std::filesystem::exists(dir.path / "sw" / "sweep_summary.csv"));
  CHECK(std::filesystem::exists(dir.path / "sw" / "gamma_g_0.5" / "aggregate.csv"));
  CHECK(run_cli("sweep --config " + cfg + " --param gamma_g --values \"\" --out " + out, dir) == 0);
  CHECK(test::read_file(dir.path / "stdout.txt") == "value,final_p_metric,final_consensus_err,bits_cum\n");
  CHECK(run_cli("sweep --config " + cfg + " --param n --values 3 --out " + out, dir) == 1);
}

TEST_CASE("validate-params") {
  test::TempDir dir("cli_validate");
  const auto table1 = write_config(dir, "table1.cfg", "# defaults\n");
  CHECK(run_cli("validate-params --config " + table1, dir) == 3);
  const std::string text = test::read_file(dir.path / "stdout.txt");
  CHECK(text.find("FAIL gamma_g_lower") != std::string::npos);
  CHECK(text.find("rho0 = ") != std::string::npos);

  const auto passing = write_config(dir, "passing.cfg", R"(
n = 2
topology = complete
compressor = identity
objective = quadratic
d = 1
lf1 = 1
lf2 = 1
gamma1 = 1
beta = 0.9
T = 1e8
eta_rule = horizon
gamma_g = 1
gamma_x = 4.0030947757388259e-6
)");
  CHECK(run_cli("validate-params --config " + passing, dir) == 0);
  CHECK(test::read_file(dir.path / "stdout.txt").find("result: PASS") != std::string::npos);
}
