#include "cmsgd/zo_estimator.hpp"

namespace cmsgd {

Perturbation parse_perturbation(const std::string& name) {
  if (name == "bernoulli" || name == "bernoulli_scaled") return Perturbation::bernoulli_scaled;
  if (name == "uniform" || name == "uniform_cube") return Perturbation::uniform_cube;
  throw std::invalid_argument("unknown perturbation '" + name + "'");
}

double ZOConfig::sigma1(std::size_t d) const { return 1.0 / static_cast<double>(d); }

double ZOConfig::sigma2(std::size_t) const {
  return perturbation == Perturbation::bernoulli_scaled ? 1.0 : std::sqrt(3.0);
}

Vector sample_perturbation(const ZOConfig& cfg, std::size_t d, Rng& rng) {
  if (d == 0) throw std::invalid_argument("sample_perturbation: d must be >= 1");
  Vector u(d);
  const double dd = static_cast<double>(d);
  switch (cfg.perturbation) {
    case Perturbation::bernoulli_scaled: {
      const double a = 1.0 / std::sqrt(dd);
      std::bernoulli_distribution coin(0.5);
      for (std::size_t i = 0; i < d; ++i) u(i) = coin(rng) ? a : -a;
      break;
    }
    case Perturbation::uniform_cube: {
      const double a = std::sqrt(3.0 / dd);
      std::uniform_real_distribution<double> unif(-a, a);
      for (std::size_t i = 0; i < d; ++i) u(i) = unif(rng);
      break;
    }
  }
  return u;
}

double bias_bound(const ZOConfig& cfg, std::size_t d, double hessian_bound) {
  if (hessian_bound < 0.0) throw std::invalid_argument("bias_bound: hessian bound must be >= 0");
  const double s2 = cfg.sigma2(d);
  return cfg.gamma_g / (2.0 * cfg.sigma1(d)) * s2 * s2 * s2 * hessian_bound;
}

}  // namespace cmsgd
