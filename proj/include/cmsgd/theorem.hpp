#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cmsgd/types.hpp"

namespace cmsgd {

/// Everything the parameter conditions depend on.
struct TheoremInputs {
  double delta = 1.0;    // spectral gap
  double lambda = 1.0;   // max_i (1 - λ_i(W))
  double omega = 1.0;    // compression parameter
  double beta = 0.9;
  double eta = 0.01;
  double gamma_g = 1.0;
  double gamma_x = 0.1;
  double d = 1.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double lf1 = 1.0;      // L_f1
  double lf2 = 1.0;      // L_f2
  double gamma1 = 1.0;   // E[f^2] <= γ1^2
  double noise_var = 0.0;
  double n = 1.0;
  double T = 1.0;
  bool horizon_rule = true;  // η must equal (1 - β) sqrt(n / T)
};

/// Contraction constants with α1 = γxδ/2, α2 = 2/(γxδ), α6 = 4/ω and
/// α3 = α4 = α5 = α7 = α8 = ω/4 substituted.
struct LemmaConstants {
  double alpha1 = 0, alpha2 = 0, alpha3 = 0, alpha6 = 0;
  double eps1 = 0, eps2 = 0, eps3 = 0, eps4 = 0;
  double kappa1 = 0, kappa2 = 0, kappa3 = 0;
  double ell1 = 0, ell2 = 0, ell3 = 0;
};

/// ρ-dependent constants of the final parameter analysis.
struct RateConstants {
  double rho = 0;
  double eps0 = 0, eps1 = 0, eps2 = 0, eps4 = 0, eps5 = 0, eps6 = 0;
  double eps7 = 0, eps8 = 0, eps9 = 0, kappa5 = 0;
  double rho0 = 0, rho1 = 0, rho2 = 0, rho3 = 0;
  double a1 = 0, a2 = 0, b1 = 0, b2 = 0;
  double m1 = 0, m2 = 0, m3 = 0, m41 = 0, m42 = 0, m4 = 0;
};

struct TheoremConstants {
  LemmaConstants lemma;
  RateConstants rate;
  double kappa4 = 0;
  double c[7] = {};              // T lower bounds c1..c7
  double gamma_tilde[3] = {};    // γ_g lower bounds
  double contraction = 0;        // max{ℓ1, ℓ2} + ρ ℓ3
  /// Expressions whose root argument left the domain; the affected values are NaN.
  std::vector<std::string> domain_violations;

  double gamma_x_low() const;   // max{m1, m3}
  double gamma_x_high() const;  // min{m2, m4}
};

/// ε4 and b1 of the rate analysis as functions of ρ.
double rate_eps4(double rho, double omega, double eps0);
double rate_b1(double rho, double delta, double lambda, double omega);

/// Full ledger; never throws on domain problems, records them instead.
TheoremConstants evaluate_constants(const TheoremInputs& in);

/// Same as evaluate_constants but throws DomainError naming the first
/// violated expression. Throws std::invalid_argument on invalid inputs.
TheoremConstants compute_constants(const TheoremInputs& in);

struct Condition {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TheoremReport {
  std::vector<Condition> conditions;
  std::vector<Condition> diagnostics;  // informational, do not affect passed()

  bool passed() const;
  std::vector<std::string> violated() const;
  std::string to_text() const;
};

/// gamma_x_lower, gamma_x_upper, gamma_x_interval, gamma_x_delta,
/// gamma_g_lower, T_lower, eta_rule.
TheoremReport check_theorem1(const TheoremConstants& k, const TheoremInputs& in);

struct CorollaryThresholds {
  double gamma_g = 0;  // T^{-1/8}
  double c1 = 0, c2 = 0;
  double c_tilde[5] = {};  // c̃3..c̃7
};

CorollaryThresholds corollary_thresholds(const TheoremInputs& in);

/// Evaluates the thresholds with γ_g = T^{-1/8}; one condition per threshold.
TheoremReport check_corollary1(const TheoremInputs& in);

/// Multi-line listing of every constant.
std::string format_ledger(const TheoremConstants& k);

}  // namespace cmsgd
