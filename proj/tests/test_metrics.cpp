#include <doctest.h>

#include <cmath>

#include "cmsgd/metrics.hpp"
#include "support.hpp"

using namespace cmsgd;

namespace {

NetworkState state_of(const Matrix& x, const Matrix& x_hat) {
  NetworkState s;
  s.x = x;
  s.x_hat = x_hat;
  s.m = Matrix::Zero(x.rows(), x.cols());
  return s;
}

}  // namespace

TEST_CASE("exact consensus has zero error") {
  Matrix x(3, 2);
  x << 1, 2, 1, 2, 1, 2;
  const auto objectives = ObjectiveSet(3, test::zero_objective(2));
  Rng rng(1);
  const auto row = compute_metrics(state_of(x, x), objectives, 1, rng);
  CHECK(row.consensus_err == 0.0);
  CHECK(row.chi == 0.0);
  CHECK(row.grad_sq == 0.0);
}

TEST_CASE("a single agent is always in consensus") {
  Matrix x(1, 3);
  x << 4, -1, 2;
  const auto objectives = ObjectiveSet(1, test::quadratic(Matrix::Identity(3, 3), Vector::Zero(3)));
  Rng rng(1);
  const auto row = compute_metrics(state_of(x, Matrix::Zero(1, 3)), objectives, 1, rng);
  CHECK(row.consensus_err == 0.0);
  CHECK(row.grad_sq == doctest::Approx(21.0));
  CHECK(row.chi == doctest::Approx(21.0));
}

TEST_CASE("p metric vanishes at the minimizer in consensus") {
  const auto objectives = make_quadratic_network(5, QuadraticParams{}, 3);
  const Vector star = quadratic_global_minimizer(objectives);
  const Matrix x = star.transpose().replicate(5, 1);
  Rng rng(1);
  const auto row = compute_metrics(state_of(x, x), objectives, 1, rng);
  CHECK(row.consensus_err == 0.0);
  CHECK(row.p_metric <= 1e-24);
}

TEST_CASE("chi splits into spread and replica error") {
  Rng gen(4);
  std::normal_distribution<double> normal;
  Matrix x(6, 3), h(6, 3);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) {
      x(i, j) = normal(gen);
      h(i, j) = normal(gen);
    }
  const auto objectives = ObjectiveSet(6, test::zero_objective(3));
  Rng rng(1);
  const auto row = compute_metrics(state_of(x, h), objectives, 1, rng);
  double spread = 0.0;
  const Eigen::RowVectorXd mean = x.colwise().mean();
  for (int i = 0; i < 6; ++i) spread += (x.row(i) - mean).squaredNorm();
  CHECK(row.consensus_err == doctest::Approx(spread / 6.0).epsilon(1e-13));
  CHECK(row.chi == doctest::Approx(spread + (x - h).squaredNorm()).epsilon(1e-13));
}

TEST_CASE("tracker strides, bits and running minimum") {
  AlgorithmConfig cfg;
  cfg.mixing = metropolis_weights(build_topology({TopologyKind::ring}, 4, 1));
  cfg.compressor = Compressor::quant(2);
  cfg.eta = 0.01;
  cfg.horizon = 100;
  const auto objectives = make_quadratic_network(4, QuadraticParams{}, 2);
  NetworkState s = init(cfg, initial_point(4, 4, true, 1));
  AgentStreams streams = AgentStreams::from_seed(1, 4);
  MetricsTracker every(objectives, 1, 1, Rng(1)), sparse(objectives, 1, 7, Rng(1));
  run(s, cfg, objectives, streams, [&](const NetworkState& st, const StepRecord& r) {
    every.observe(st, r);
    sparse.observe(st, r);
  });
  REQUIRE(every.rows().size() == 100);
  CHECK(sparse.rows().size() == 14);
  CHECK(sparse.rows().front().t == 7);
  CHECK(every.rows().front().t == 1);
  CHECK(every.rows().back().t == 100);
  CHECK(every.bits_cum() == 100 * 4 * 44);
  for (std::size_t i = 1; i < every.rows().size(); ++i) {
    CHECK(every.rows()[i].p_metric <= every.rows()[i - 1].p_metric);
    CHECK(every.rows()[i].bits_cum > every.rows()[i - 1].bits_cum);
  }
  CHECK_THROWS_AS(MetricsTracker(objectives, 1, 0, Rng(1)), std::invalid_argument);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123, -2.5}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(0.5) == "0.5");
}
