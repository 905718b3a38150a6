#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "cmsgd/compression.hpp"
#include "cmsgd/graph.hpp"
#include "cmsgd/objectives.hpp"
#include "cmsgd/types.hpp"
#include "cmsgd/zo_estimator.hpp"

namespace cmsgd {

enum class EtaRule {
  fixed,    // η as given
  horizon,  // η = (1 - β) sqrt(n / T)
};

struct AlgorithmConfig {
  double gamma_x = 0.3;
  double eta = 0.02;
  EtaRule eta_rule = EtaRule::fixed;
  double beta = 0.9;
  ZOConfig zo;
  Compressor compressor;
  MixingMatrix mixing;
  std::size_t horizon = 0;  // T
  double divergence_cap = 1e12;

  std::size_t agents() const { return mixing.size(); }
  /// The constant step size used for the whole run.
  double step_size() const;
  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

/// Stacked per-agent quantities, one row per agent.
struct NetworkState {
  Matrix x;
  Matrix m;
  Matrix x_hat;  // shared replicas
  std::size_t t = 0;
};

/// One private random stream per agent. Draw order within a step:
/// ξ, u, φ, then compressor randomness.
struct AgentStreams {
  std::vector<Rng> agents;

  static AgentStreams from_seed(std::uint64_t seed, std::size_t n);
};

struct StepRecord {
  std::size_t t = 0;       // iteration that was executed
  std::int64_t bits = 0;   // transmitted this iteration, all agents
  Matrix g;                // one-point estimates
  Matrix x_half;           // x_{t+1/2}
  Matrix messages;         // c_{i,t}, the decoded broadcasts
};

/// m = 0, x_hat = 0, t = 0.
NetworkState init(const AlgorithmConfig& cfg, const Matrix& x0);

/// x0 = 0, or standard normal entries drawn from the init stream of `seed`.
Matrix initial_point(std::size_t n, std::size_t d, bool normal, std::uint64_t seed);

/// One iteration. Agents run in parallel; results are bit-identical to
/// reference::step for any thread count.
StepRecord step(NetworkState& state, const AlgorithmConfig& cfg, const ObjectiveSet& objectives,
                AgentStreams& streams);

using StepObserver = std::function<void(const NetworkState&, const StepRecord&)>;

/// Runs state.t .. T-1. The observer sees the state after every step.
void run(NetworkState& state, const AlgorithmConfig& cfg, const ObjectiveSet& objectives,
         AgentStreams& streams, const StepObserver& observer = {});

namespace reference {

/// Plain serial loops, kept as the oracle for the parallel kernel.
StepRecord step(NetworkState& state, const AlgorithmConfig& cfg, const ObjectiveSet& objectives,
                AgentStreams& streams);

}  // namespace reference

namespace detail {

// Shared by both kernels so they perform identical arithmetic.
void local_update(std::size_t i, NetworkState& state, const AlgorithmConfig& cfg, double eta,
                  const LocalObjective& objective, Rng& rng, StepRecord& rec);
void consensus_row(std::size_t i, const NetworkState& state, const AlgorithmConfig& cfg,
                   const Matrix& x_half, Matrix& x_next);
void check_finite(const NetworkState& state, const AlgorithmConfig& cfg, std::size_t t);
void check_inputs(const NetworkState& state, const AlgorithmConfig& cfg,
                  const ObjectiveSet& objectives, const AgentStreams& streams);

}  // namespace detail

}  // namespace cmsgd
