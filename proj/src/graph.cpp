#include "cmsgd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace cmsgd {

std::vector<std::size_t> Topology::degrees() const {
  std::vector<std::size_t> deg(n, 0);
  for (const auto& [i, j] : edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

bool Topology::has_edge(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges.begin(), edges.end(), Edge{i, j});
}

bool is_connected(std::size_t n, const std::vector<Edge>& edges) {
  if (n == 0) return false;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto v = frontier.front();
    frontier.pop();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == n;
}

Topology make_topology(std::size_t n, std::vector<Edge> edges) {
  if (n == 0) throw std::invalid_argument("topology needs at least one agent");
  for (auto& e : edges) {
    if (e.first >= n || e.second >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.first == e.second) throw std::invalid_argument("self-loop edges are not allowed");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (!is_connected(n, edges)) {
    throw ConnectivityFailure("topology with " + std::to_string(n) + " agents is disconnected");
  }
  return Topology{n, std::move(edges)};
}

Topology build_topology(const TopologySpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("topology needs at least one agent");
  std::vector<Edge> edges;
  switch (spec.kind) {
    case TopologyKind::ring:
      if (n == 2) {
        edges.emplace_back(0, 1);
      } else if (n > 2) {
        for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
      }
      return make_topology(n, std::move(edges));
    case TopologyKind::complete:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      return make_topology(n, std::move(edges));
    case TopologyKind::explicit_edges:
      return make_topology(n, spec.edges);
    case TopologyKind::erdos_renyi: {
      if (!(spec.er_p > 0.0 && spec.er_p <= 1.0))
        throw std::invalid_argument("erdos_renyi requires 0 < p <= 1");
      Rng rng = make_stream(seed, StreamKind::topology);
      std::bernoulli_distribution coin(spec.er_p);
      for (int attempt = 0; attempt < kErdosRenyiMaxAttempts; ++attempt) {
        edges.clear();
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng)) edges.emplace_back(i, j);
        if (is_connected(n, edges)) return make_topology(n, std::move(edges));
      }
      throw ConnectivityFailure("erdos_renyi: no connected sample after " +
                                std::to_string(kErdosRenyiMaxAttempts) + " attempts");
    }
  }
  throw std::invalid_argument("unknown topology kind");
}

std::vector<Edge> parse_edge_list(const std::string& text) {
  std::vector<Edge> edges;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == item.size())
      throw std::invalid_argument("malformed edge '" + item + "'");
    try {
      edges.emplace_back(std::stoul(item.substr(0, dash)), std::stoul(item.substr(dash + 1)));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("malformed edge '" + item + "'");
    }
  }
  return edges;
}

MixingMatrix metropolis_weights(const Topology& topology) {
  const auto n = topology.n;
  const auto deg = topology.degrees();
  Matrix w = Matrix::Zero(n, n);
  for (const auto& [i, j] : topology.edges) {
    const double wij = 1.0 / (1.0 + static_cast<double>(std::max(deg[i], deg[j])));
    w(i, j) = wij;
    w(j, i) = wij;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  validate_mixing(w, topology);
  const auto spec = spectral_quantities(w);
  return MixingMatrix{std::move(w), spec.spectral_gap, spec.lambda_dev};
}

Spectrum spectral_quantities(const Matrix& weights) {
  const auto n = weights.rows();
  if (n == 0 || weights.cols() != n) throw std::invalid_argument("mixing matrix must be square");
  if (n == 1) return Spectrum{1.0, 0.0};

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(weights),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SpectrumViolation("eigensolver did not converge");
  // Ascending order; the last entry is the Perron eigenvalue 1.
  const Eigen::VectorXd& ev = solver.eigenvalues();
  double second = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) second = std::max(second, std::abs(ev(i)));
  if (second >= 1.0 - 1e-12) {
    throw SpectrumViolation("non-leading eigenvalue of magnitude " + std::to_string(second) +
                            " (graph disconnected or periodic)");
  }
  return Spectrum{1.0 - second, 1.0 - ev(0)};
}

void validate_mixing(const Matrix& w, const Topology& topology, double tol) {
  const auto n = static_cast<Eigen::Index>(topology.n);
  if (w.rows() != n || w.cols() != n) throw std::invalid_argument("mixing matrix shape mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(w(i, i) > 0.0)) throw std::invalid_argument("mixing matrix needs w_ii > 0");
    if (std::abs(w.row(i).sum() - 1.0) > tol || std::abs(w.col(i).sum() - 1.0) > tol)
      throw std::invalid_argument("mixing matrix is not doubly stochastic");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (w(i, j) != w(j, i)) throw std::invalid_argument("mixing matrix is not symmetric");
      if (i == j) continue;
      const bool edge = topology.has_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (edge != (w(i, j) > 0.0) || w(i, j) < 0.0)
        throw std::invalid_argument("mixing matrix sparsity does not match topology");
    }
  }
}

}  // namespace cmsgd
