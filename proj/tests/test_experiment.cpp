#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cmsgd/experiment.hpp"
#include "support.hpp"

using namespace cmsgd;

namespace {

ExperimentConfig small_quadratic() {
  ExperimentConfig c;
  c.n = 4;
  c.objective = ObjectiveKind::quadratic;
  c.quadratic.dimension = 4;
  c.logistic.dimension = 4;
  c.eta = 0.005;
  c.T = 10;
  c.metric_every = 1;
  c.seeds = {1};
  return c;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

}  // namespace

TEST_CASE("ten steps give ten rows") {
  test::TempDir dir("rows");
  const auto res = run_experiment(small_quadratic(), dir.path.string());
  REQUIRE(res.runs.size() == 1);
  CHECK(res.runs[0].rows.size() == 10);
  const std::string csv = test::read_file(dir.path / "seed_1.csv");
  CHECK(count_lines(csv) == 11);
  CHECK(csv.rfind(std::string(kMetricsHeader) + "\n", 0) == 0);
  const std::string agg = test::read_file(dir.path / "aggregate.csv");
  CHECK(agg.rfind(std::string(kMetricsHeader) + ",n_seeds\n", 0) == 0);
  CHECK(count_lines(agg) == 11);
  CHECK(std::filesystem::exists(dir.path / "config.txt"));
  CHECK(parse_config(test::read_file(dir.path / "config.txt")).T == 10);
}

TEST_CASE("reruns are byte identical") {
  test::TempDir a("rerun_a"), b("rerun_b");
  ExperimentConfig c = small_quadratic();
  c.seeds = {1, 2, 3};
  c.T = 40;
  c.compressor = Compressor::quant(2);
  run_experiment(c, a.path.string());
  run_experiment(c, b.path.string());
  for (const char* f : {"seed_1.csv", "seed_2.csv", "seed_3.csv", "aggregate.csv", "config.txt"})
    CHECK(test::read_file(a.path / f) == test::read_file(b.path / f));
}

TEST_CASE("aggregate is the per-row mean") {
  ExperimentConfig c = small_quadratic();
  c.seeds = {1, 2};
  const auto res = run_experiment(c, "");
  REQUIRE(res.aggregate.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& a = res.runs[0].rows[i];
    const auto& b = res.runs[1].rows[i];
    CHECK(res.aggregate[i].mean.consensus_err == doctest::Approx((a.consensus_err + b.consensus_err) / 2));
    CHECK(res.aggregate[i].mean.p_metric == doctest::Approx((a.p_metric + b.p_metric) / 2));
    CHECK(res.aggregate[i].n_seeds == 2);
  }
}

TEST_CASE("diverged seeds are excluded and flagged") {
  ExperimentConfig c = small_quadratic();
  c.x0_normal = true;
  c.eta = 5.0;
  c.beta = 0.0;
  c.T = 200;
  c.divergence_cap = 1e3;
  c.seeds = {1, 2};
  test::TempDir dir("diverge");
  std::ostringstream warn;
  const auto res = run_experiment(c, dir.path.string(), &warn);
  CHECK(res.converged_runs() == 0);
  CHECK(res.aggregate.empty());
  CHECK(warn.str().find("seed 1 diverged") != std::string::npos);
  const std::string csv = test::read_file(dir.path / "seed_1.csv");
  CHECK(csv.find("diverged_at") != std::string::npos);
  // the last data line carries the divergence iteration
  REQUIRE(res.runs[0].diverged_at.has_value());
  CHECK(csv.find("," + std::to_string(*res.runs[0].diverged_at) + "\n") != std::string::npos);
}

TEST_CASE("a seed that diverges before the first row still writes a row") {
  RunResult r;
  r.seed = 3;
  r.diverged_at = 0;
  std::ostringstream os;
  write_run_csv(os, r);
  CHECK(os.str() == std::string(kMetricsHeader) + ",diverged_at\n0,nan,nan,nan,nan,0,0\n");
}

TEST_CASE("sweeps") {
  ExperimentConfig c = small_quadratic();
  SUBCASE("empty value list") {
    test::TempDir dir("sweep_empty");
    const auto pts = sweep(c, "gamma_g", {}, dir.path.string());
    CHECK(pts.empty());
    CHECK(test::read_file(dir.path / "sweep_summary.csv") == std::string(kSweepHeader) + "\n");
  }
  SUBCASE("one directory per value") {
    test::TempDir dir("sweep_dirs");
    const auto pts = sweep(c, "gamma_g", {"0.5", "1"}, dir.path.string());
    REQUIRE(pts.size() == 2);
    CHECK(std::filesystem::exists(dir.path / "gamma_g_0.5" / "aggregate.csv"));
    CHECK(std::filesystem::exists(dir.path / "gamma_g_1" / "seed_1.csv"));
    CHECK(count_lines(test::read_file(dir.path / "sweep_summary.csv")) == 3);
    CHECK(pts[0].final_p_metric == pts[0].result.aggregate.back().mean.p_metric);
  }
  SUBCASE("eta sweeps switch to the fixed rule") {
    c.eta_rule = EtaRule::horizon;
    const auto pts = sweep(c, "eta", {"0.001"}, "");
    CHECK(pts.size() == 1);
  }
  SUBCASE("bad values fail before anything runs") {
    test::TempDir dir("sweep_bad");
    CHECK_THROWS_AS(sweep(c, "beta", {"0.5", "1.5"}, dir.path.string()), ConfigError);
    CHECK_FALSE(std::filesystem::exists(dir.path / "beta_0.5"));
    CHECK_THROWS_AS(sweep(c, "n", {"3"}, ""), ConfigError);
  }
  SUBCASE("compressor sweep") {
    const auto pts = sweep(c, "compressor", {"identity", "quant2bit"}, "");
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].bits_cum == 10 * 4 * 128);
    CHECK(pts[1].bits_cum == 10 * 4 * 44);
  }
}
