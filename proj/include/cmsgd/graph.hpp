#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cmsgd/types.hpp"

namespace cmsgd {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected connected communication graph. Edges are stored as (i, j) with
/// i < j, sorted, without duplicates or self-loops.
struct Topology {
  std::size_t n = 0;
  std::vector<Edge> edges;

  std::vector<std::size_t> degrees() const;
  bool has_edge(std::size_t i, std::size_t j) const;
};

enum class TopologyKind { ring, complete, erdos_renyi, explicit_edges };

struct TopologySpec {
  TopologyKind kind = TopologyKind::ring;
  double er_p = 0.5;
  std::vector<Edge> edges;  // explicit_edges only
};

inline constexpr int kErdosRenyiMaxAttempts = 1000;

/// Normalizes and validates an edge list. Throws ConnectivityFailure when the
/// graph does not reach every agent and std::invalid_argument on bad edges.
Topology make_topology(std::size_t n, std::vector<Edge> edges);

/// Builds a connected topology. Erdős–Rényi graphs are resampled until
/// connected (at most kErdosRenyiMaxAttempts draws from `seed`).
Topology build_topology(const TopologySpec& spec, std::size_t n, std::uint64_t seed);

/// Parses "0-1,1-2,..." into an edge list.
std::vector<Edge> parse_edge_list(const std::string& text);

bool is_connected(std::size_t n, const std::vector<Edge>& edges);

struct Spectrum {
  double spectral_gap = 1.0;  // δ
  double lambda_dev = 0.0;    // λ = max_i (1 - λ_i(W))
};

struct MixingMatrix {
  Matrix weights;
  double spectral_gap = 1.0;
  double lambda_dev = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
};

/// Metropolis–Hastings weights: w_ij = 1 / (1 + max(deg_i, deg_j)) on edges.
MixingMatrix metropolis_weights(const Topology& topology);

/// Dense symmetric eigensolve of W. δ is one minus the second largest
/// eigenvalue magnitude; throws SpectrumViolation if any non-leading
/// eigenvalue has magnitude >= 1.
Spectrum spectral_quantities(const Matrix& weights);

/// Throws std::invalid_argument unless W is symmetric, doubly stochastic
/// within `tol`, has a positive diagonal and a sparsity pattern matching the
/// topology.
void validate_mixing(const Matrix& weights, const Topology& topology, double tol = 1e-12);

}  // namespace cmsgd
