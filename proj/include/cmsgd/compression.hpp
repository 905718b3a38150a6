#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "cmsgd/types.hpp"

namespace cmsgd {

enum class CompressorKind { identity, rand_k, top_k, norm_sign, quant2bit };

/// Immutable descriptor of a compression operator C with E||x - C(x)||^2 <= (1 - ω)||x||^2.
struct Compressor {
  CompressorKind kind = CompressorKind::identity;
  std::size_t k = 1;       // rand_k / top_k: coordinates kept
  int k2 = 2;              // quant2bit: level bits
  int scalar_bits = 32;    // quant2bit: bits for ||x||_inf
  bool rand_k_unbiased = false;  // scale kept coordinates by d/k

  static Compressor identity() { return {}; }
  static Compressor top(std::size_t k) { return {CompressorKind::top_k, k}; }
  static Compressor random(std::size_t k, bool unbiased = false) {
    return {CompressorKind::rand_k, k, 2, 32, unbiased};
  }
  static Compressor norm_sign() { return {CompressorKind::norm_sign}; }
  static Compressor quant(int k2 = 2, int scalar_bits = 32) {
    return {CompressorKind::quant2bit, 1, k2, scalar_bits};
  }

  /// Analytic contraction parameter in dimension d, when one exists in (0, 1].
  /// quant2bit has one only while d < 4^{k2}; the unbiased rand_k only while k > d/2.
  std::optional<double> omega_nominal(std::size_t d) const;

  /// C(x) == x for every x.
  bool lossless() const { return kind == CompressorKind::identity; }

  std::string name() const;
};

CompressorKind parse_compressor_kind(const std::string& name);

struct CompressedMessage {
  Vector payload;  // decoded C(x)
  std::int64_t bits = 0;
};

/// Idealized transmitted bits for one message in dimension d.
std::int64_t bit_cost(const Compressor& c, std::size_t d);

/// Applies C to x. Randomness, if any, is drawn from `rng`; a zero input
/// returns zero without consuming randomness.
CompressedMessage compress(const Compressor& c, const Vector& x, Rng& rng);

/// Writes C(x) into `out` (resized as needed). Same draws as compress().
void compress_into(const Compressor& c, const Vector& x, Rng& rng, Vector& out);

struct ContractionEstimate {
  double omega = 0.0;           // 1 - mean ||x - C(x)||^2 / ||x||^2
  double standard_error = 0.0;  // of the mean ratio
};

/// Monte Carlo estimate of ω over standard normal inputs in dimension d.
ContractionEstimate contraction_estimate(const Compressor& c, std::size_t d, std::size_t trials,
                                         Rng& rng);

}  // namespace cmsgd
