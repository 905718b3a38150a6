#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "cmsgd/types.hpp"

namespace cmsgd {

enum class Perturbation {
  bernoulli_scaled,  // coordinates ±1/sqrt(d): σ1 = 1/d, σ2 = 1
  uniform_cube,      // coordinates U[-sqrt(3/d), sqrt(3/d)]: σ1 = 1/d, σ2 = sqrt(3)
};

Perturbation parse_perturbation(const std::string& name);

struct ZOConfig {
  double gamma_g = 0.99;   // smoothing radius
  Perturbation perturbation = Perturbation::bernoulli_scaled;
  double noise_var = 0.0;  // ϑ2, variance of the additive query noise

  /// E[u_j^2] in dimension d.
  double sigma1(std::size_t d) const;
  /// Deterministic bound on ||u|| in dimension d.
  double sigma2(std::size_t d) const;
};

/// Draws one symmetric perturbation vector with i.i.d. coordinates.
Vector sample_perturbation(const ZOConfig& cfg, std::size_t d, Rng& rng);

struct OnePointSample {
  Vector g;            // (d / γ_g) u (f(x + γ_g u, ξ) + φ)
  Vector u;
  double phi = 0.0;    // query noise
  double value = 0.0;  // f(x + γ_g u, ξ) without noise
};

/// Single-query zeroth-order gradient estimate. `query` evaluates the
/// stochastic objective at a point with its data sample already bound; it is
/// called exactly once. Draw order on `rng`: u, then φ (always drawn, even
/// when ϑ2 = 0, so the stream position does not depend on the noise level).
template <class Query>
OnePointSample one_point_gradient(Query&& query, const Vector& x, const ZOConfig& cfg, Rng& rng) {
  if (!(cfg.gamma_g > 0.0)) throw std::invalid_argument("one_point_gradient: gamma_g must be > 0");
  const auto d = static_cast<std::size_t>(x.size());
  OnePointSample s;
  s.u = sample_perturbation(cfg, d, rng);
  std::normal_distribution<double> normal;
  s.phi = std::sqrt(cfg.noise_var) * normal(rng);
  const Vector probe = x + cfg.gamma_g * s.u;
  s.value = query(probe);
  if (!std::isfinite(s.value)) throw QueryFailure("objective returned a non-finite value");
  s.g = (static_cast<double>(d) / cfg.gamma_g * (s.value + s.phi)) * s.u;
  return s;
}

/// Lemma-1 style bias bound (γ_g / (2 σ1)) σ2^3 ϑ1, where ϑ1 bounds the
/// Hessian norm of the local objective. ϑ1 is taken to be L_f2.
double bias_bound(const ZOConfig& cfg, std::size_t d, double hessian_bound);

}  // namespace cmsgd
