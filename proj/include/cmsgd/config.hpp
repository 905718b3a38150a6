#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmsgd/compression.hpp"
#include "cmsgd/engine.hpp"
#include "cmsgd/graph.hpp"
#include "cmsgd/objectives.hpp"
#include "cmsgd/theorem.hpp"
#include "cmsgd/zo_estimator.hpp"

namespace cmsgd {

enum class ObjectiveKind { logistic, quadratic };

/// Full specification of a seeded experiment.
struct ExperimentConfig {
  // graph
  std::size_t n = 6;
  TopologySpec topology;
  // compression
  Compressor compressor = Compressor::quant(2, 32);
  // estimator
  ZOConfig zo;
  // objective
  ObjectiveKind objective = ObjectiveKind::logistic;
  LogisticParams logistic;
  QuadraticParams quadratic;
  std::uint64_t planted_seed = 0;
  // algorithm
  double gamma_x = 0.3;
  double eta = 0.02;
  EtaRule eta_rule = EtaRule::fixed;
  double beta = 0.9;
  std::size_t T = 5000;
  double divergence_cap = 1e12;
  bool x0_normal = false;
  // runner
  std::uint64_t seed = 1;  // also seeds the topology
  std::vector<std::uint64_t> seeds{1};
  std::size_t metric_eval_batch = 1000;
  std::size_t metric_every = 10;
  std::string out = "out";
  // theorem-validator overrides
  std::optional<double> lf1, lf2, gamma1, omega;

  std::size_t dimension() const;
  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Parses key=value lines. '#' starts a comment; values may be double-quoted.
/// Unknown keys, malformed lines and bad values raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Applies one key=value assignment (the same keys as the file format).
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Canonical key=value text that parse_config reads back to the same config.
std::string to_config_text(const ExperimentConfig& cfg);

/// Derived components.
Topology topology_for(const ExperimentConfig& cfg);
MixingMatrix mixing_for(const ExperimentConfig& cfg);
ObjectiveSet objectives_for(const ExperimentConfig& cfg);
AlgorithmConfig algorithm_for(const ExperimentConfig& cfg, const MixingMatrix& mixing);

/// ω used by the validator: the override, else the analytic value, else a
/// 10^4-trial Monte Carlo estimate on a fixed stream.
double omega_for(const ExperimentConfig& cfg);
TheoremInputs theorem_inputs_for(const ExperimentConfig& cfg);

}  // namespace cmsgd
