#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cmsgd {

using Vector = Eigen::VectorXd;
// One row per agent.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Rng = std::mt19937_64;

/// Independent purposes that a master seed is split into.
enum class StreamKind : std::uint64_t {
  agent = 1,
  init = 2,
  metrics = 3,
  planted = 4,
  topology = 5,
  problem = 6,
  estimate = 7,
};

/// Derives a stream from (seed, purpose, index). Streams with different
/// purposes or indices never share a seed sequence.
inline Rng make_stream(std::uint64_t seed, StreamKind kind, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

struct ConnectivityFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpectrumViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QueryFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalDivergence : std::runtime_error {
  NumericalDivergence(std::size_t t, const std::string& what)
      : std::runtime_error(what), iteration(t) {}
  std::size_t iteration;
};

}  // namespace cmsgd
