#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cmsgd/graph.hpp"

using namespace cmsgd;

namespace {

// Spectral norm through the SVD, independent of the eigensolver in the library.
double spectral_norm(const Matrix& a) {
  const Eigen::MatrixXd dense = a;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
  return svd.singularValues()(0);
}

Matrix centered(const Matrix& w) {
  const auto n = w.rows();
  return w - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
}

}  // namespace

TEST_CASE("topology edge sets") {
  const auto complete2 = build_topology({TopologyKind::complete}, 2, 1);
  CHECK(complete2.edges == std::vector<Edge>{{0, 1}});

  const auto ring4 = build_topology({TopologyKind::ring}, 4, 1);
  CHECK(ring4.edges == std::vector<Edge>{{0, 1}, {0, 3}, {1, 2}, {2, 3}});

  const auto complete5 = build_topology({TopologyKind::complete}, 5, 1);
  CHECK(complete5.edges.size() == 10);
  for (auto d : complete5.degrees()) CHECK(d == 4);
}

TEST_CASE("disconnected graphs are rejected") {
  TopologySpec spec{TopologyKind::explicit_edges};
  spec.edges = {{0, 1}};
  CHECK_THROWS_AS(build_topology(spec, 3, 1), ConnectivityFailure);
  CHECK_THROWS_AS(make_topology(3, {}), ConnectivityFailure);
  // p tiny on 20 agents: no draw in the attempt budget is connected
  CHECK_THROWS_AS(build_topology({TopologyKind::erdos_renyi, 1e-9}, 20, 3), ConnectivityFailure);
}

TEST_CASE("bad edges") {
  CHECK_THROWS_AS(make_topology(3, {{0, 0}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(make_topology(3, {{0, 5}, {1, 2}}), std::invalid_argument);
  const auto t = make_topology(3, {{2, 1}, {0, 1}, {1, 0}});
  CHECK(t.edges == std::vector<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("edge list parsing") {
  CHECK(parse_edge_list("0-1, 1-2,2-3") == std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}});
  CHECK_THROWS(parse_edge_list("0-x"));
}

TEST_CASE("metropolis weights on small graphs") {
  SUBCASE("ring of four") {
    const auto w = metropolis_weights(build_topology({TopologyKind::ring}, 4, 1)).weights;
    for (int i = 0; i < 4; ++i) {
      CHECK(w(i, i) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
      CHECK(w(i, (i + 1) % 4) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
      CHECK(w(i, (i + 2) % 4) == 0.0);
    }
  }
  SUBCASE("complete pair") {
    const auto w = metropolis_weights(build_topology({TopologyKind::complete}, 2, 1)).weights;
    CHECK(w(0, 0) == 0.5);
    CHECK(w(0, 1) == 0.5);
    CHECK(w(1, 1) == 0.5);
  }
  SUBCASE("star with centre 0") {
    const auto w = metropolis_weights(make_topology(3, {{0, 1}, {0, 2}})).weights;
    CHECK(w(0, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(w(0, 2) == doctest::Approx(1.0 / 3.0));
    CHECK(w(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(w(1, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(w(2, 2) == doctest::Approx(2.0 / 3.0));
    CHECK(w(1, 2) == 0.0);
  }
}

TEST_CASE("spectral quantities") {
  SUBCASE("complete pair") {
    const auto m = metropolis_weights(build_topology({TopologyKind::complete}, 2, 1));
    CHECK(m.spectral_gap == doctest::Approx(1.0));
    CHECK(m.lambda_dev == doctest::Approx(1.0));
  }
  SUBCASE("single agent") {
    const auto m = metropolis_weights(make_topology(1, {}));
    CHECK(m.spectral_gap == 1.0);
    CHECK(m.lambda_dev == 0.0);
  }
  SUBCASE("rings match the circulant spectrum") {
    for (std::size_t n = 3; n <= 12; ++n) {
      CAPTURE(n);
      // every node has degree 2, so W is circulant with eigenvalues 1/3 + 2/3 cos(2πk/n)
      double second = 0.0, lowest = 1.0;
      for (std::size_t k = 1; k < n; ++k) {
        const double ev = 1.0 / 3.0 + 2.0 / 3.0 * std::cos(2.0 * std::numbers::pi * k / n);
        second = std::max(second, std::abs(ev));
        lowest = std::min(lowest, ev);
      }
      const auto m = metropolis_weights(build_topology({TopologyKind::ring}, n, 1));
      CHECK(m.spectral_gap == doctest::Approx(1.0 - second).epsilon(1e-12));
      CHECK(m.lambda_dev == doctest::Approx(1.0 - lowest).epsilon(1e-12));
    }
  }
  SUBCASE("ring of four") {
    const auto m = metropolis_weights(build_topology({TopologyKind::ring}, 4, 1));
    CHECK(m.spectral_gap == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(m.lambda_dev == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("identity matrix has no gap") {
    CHECK_THROWS_AS(spectral_quantities(Matrix::Identity(3, 3)), SpectrumViolation);
  }
}

TEST_CASE("validate_mixing") {
  const auto topo = build_topology({TopologyKind::ring}, 4, 1);
  const auto m = metropolis_weights(topo);
  CHECK_NOTHROW(validate_mixing(m.weights, topo));
  Matrix bad = m.weights;
  bad(0, 1) += 1e-6;
  CHECK_THROWS_AS(validate_mixing(bad, topo), std::invalid_argument);
  Matrix wrong_pattern = m.weights;
  wrong_pattern(0, 2) = wrong_pattern(2, 0) = 0.1;
  wrong_pattern(0, 0) -= 0.1;
  wrong_pattern(2, 2) -= 0.1;
  CHECK_THROWS_AS(validate_mixing(wrong_pattern, topo), std::invalid_argument);
}

TEST_CASE("generated mixing matrices satisfy the contract") {
  for (auto kind : {TopologyKind::ring, TopologyKind::complete, TopologyKind::erdos_renyi}) {
    for (std::size_t n : {2u, 4u, 6u, 20u}) {
      for (std::uint64_t seed : {1u, 2u, 7u}) {
        CAPTURE(static_cast<int>(kind));
        CAPTURE(n);
        CAPTURE(seed);
        const auto topo = build_topology({kind, 0.3}, n, seed);
        const auto m = metropolis_weights(topo);
        const Matrix& w = m.weights;
        CHECK_NOTHROW(validate_mixing(w, topo));
        CHECK((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((w.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
        CHECK(m.spectral_gap > 0.0);
        CHECK(m.spectral_gap <= 1.0);
        CHECK(m.lambda_dev > 0.0);
        CHECK(m.lambda_dev < 2.0);
        CHECK(std::abs(spectral_norm(centered(w)) - (1.0 - m.spectral_gap)) <= 1e-10);
        // the average is a fixed point
        const Vector ones = Vector::Ones(static_cast<Eigen::Index>(n));
        CHECK(((w * ones) - ones).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("erdos renyi draws are reproducible") {
  const auto a = build_topology({TopologyKind::erdos_renyi, 0.3}, 12, 99);
  const auto b = build_topology({TopologyKind::erdos_renyi, 0.3}, 12, 99);
  CHECK(a.edges == b.edges);
  CHECK(is_connected(12, a.edges));
}
