#include "cmsgd/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cmsgd/metrics.hpp"

namespace cmsgd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_inputs(const TheoremInputs& in) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
  };
  if (!(in.delta > 0.0 && in.delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (!(in.omega > 0.0 && in.omega <= 1.0)) throw std::invalid_argument("omega must lie in (0, 1]");
  if (!(in.beta >= 0.0 && in.beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
  positive(in.lambda, "lambda");
  positive(in.eta, "eta");
  positive(in.gamma_g, "gamma_g");
  positive(in.gamma_x, "gamma_x");
  positive(in.d, "d");
  positive(in.sigma1, "sigma1");
  positive(in.sigma2, "sigma2");
  positive(in.lf1, "L_f1");
  positive(in.lf2, "L_f2");
  positive(in.gamma1, "gamma1");
  positive(in.n, "n");
  positive(in.T, "T");
  if (!(in.noise_var >= 0.0)) throw std::invalid_argument("noise_var must be >= 0");
}

double checked_sqrt(double v, const char* expr, std::vector<std::string>& violations) {
  if (!(v >= 0.0)) {
    violations.push_back(std::string(expr) + " = " + format_number(v) + " < 0");
    return kNaN;
  }
  return std::sqrt(v);
}

double checked_cbrt(double v, const char* expr, std::vector<std::string>& violations) {
  if (!(v > 0.0)) {
    violations.push_back(std::string(expr) + " = " + format_number(v) + " <= 0");
    return kNaN;
  }
  return std::cbrt(v);
}

LemmaConstants lemma_constants(const TheoremInputs& in) {
  LemmaConstants l;
  const double gx = in.gamma_x, dl = in.delta, w = in.omega;
  l.alpha1 = gx * dl / 2.0;
  l.alpha2 = 2.0 / (gx * dl);
  l.alpha3 = w / 4.0;  // also α4, α5, α7, α8
  l.alpha6 = 4.0 / w;
  const double a3 = l.alpha3, a4 = a3, a5 = a3, a7 = a3, a8 = a3, a6 = l.alpha6;
  const double lam2 = in.lambda * in.lambda;
  const double gl = gx * gx * lam2;
  const double bracket = (1.0 + a3) * (1.0 - w) * (1.0 + 1.0 / a4) + (1.0 + 1.0 / a3);

  l.eps1 = (1.0 + l.alpha1) * (1.0 - gx * dl) * (1.0 - gx * dl);
  l.eps2 = (1.0 + 1.0 / l.alpha1) * gl;
  l.eps3 = l.eps2 * (1.0 + 1.0 / l.alpha2) * bracket;
  l.eps4 = l.eps2 * (1.0 + 1.0 / l.alpha2) * (1.0 + a3) * (1.0 - w) * (1.0 + a4);
  const double pre = (1.0 + 1.0 / a5) * gl;
  l.kappa1 = pre * ((1.0 + a6) * (1.0 + a7) * bracket + (1.0 + 1.0 / a6));
  l.kappa2 = pre * (1.0 + a6) * (1.0 + a7) * (1.0 + a3) * (1.0 - w) * (1.0 + a4);
  l.kappa3 = pre * (1.0 + a6) * (1.0 + 1.0 / a7);

  const double leak = (1.0 + a5) * (1.0 - w) * (1.0 + a8);
  l.ell1 = l.eps1 * (1.0 + 1.0 / l.alpha2) + l.kappa3;
  l.ell2 = l.eps4 + leak + l.kappa2;
  l.ell3 = l.eps3 + (1.0 + l.alpha2) * (l.eps1 + l.eps2) + leak + l.kappa1;
  return l;
}

}  // namespace

double rate_eps4(double rho, double omega, double eps0) {
  return 4.0 / 5.0 + omega / 4.0 - rho * eps0;
}

double rate_b1(double rho, double delta, double lambda, double omega) {
  const double lam2 = lambda * lambda;
  return 3.0 * lam2 / delta + 45.0 * rho * lam2 / (omega * delta);
}

double TheoremConstants::gamma_x_low() const { return std::max(rate.m1, rate.m3); }
double TheoremConstants::gamma_x_high() const { return std::min(rate.m2, rate.m4); }

TheoremConstants evaluate_constants(const TheoremInputs& in) {
  check_inputs(in);
  TheoremConstants k;
  k.lemma = lemma_constants(in);
  auto& v = k.domain_violations;

  const double dl = in.delta, w = in.omega, b = in.beta;
  const double lam2 = in.lambda * in.lambda;
  const double d2s2l2 = in.d * in.d * in.sigma2 * in.sigma2 * in.lf1 * in.lf1;
  const double gg2 = in.gamma_g * in.gamma_g;

  k.kappa4 = 4.0 * in.n * in.d * in.d * in.sigma2 * in.sigma2 *
             (in.lf1 * in.lf1 * gg2 * in.sigma2 * in.sigma2 + in.gamma1 * in.gamma1 +
              in.noise_var) /
             gg2;

  RateConstants& r = k.rate;
  r.rho = 16.0 * in.eta * in.eta * d2s2l2 / gg2;
  const double rho = r.rho;
  r.eps0 = 1.0 - w / 4.0 + 9.0 * lam2 / (dl * dl);
  r.eps1 = dl - 45.0 * rho * lam2 / (w * dl);
  r.eps2 = 4.0 / 5.0 - rho * r.eps0;
  r.eps4 = rate_eps4(rho, w, r.eps0);
  r.eps5 = (2.0 / 5.0 + w / 4.0) / (2.0 * (3.0 * lam2 / dl + 18.0 * lam2 / (w * dl * r.eps0)));
  r.eps6 = dl * dl * dl * w * w * w + 128.0 * dl * w * lam2;
  r.rho0 = 2.0 / (5.0 * r.eps0);
  r.rho1 = 10.0 / 9.0 * (std::max(k.lemma.ell1, k.lemma.ell2) + k.lemma.ell3 * rho);
  r.rho2 = r.eps5 * r.eps5 * r.eps5 * r.eps6 / (12.0 * w * w * w);
  r.eps7 = r.eps6 + 1500.0 * r.rho0 * dl * lam2 + 25.0 * w * w * r.rho0 * dl * lam2;
  r.eps8 = checked_cbrt(12.0 * w * w * w / r.eps7, "12 omega^3 / eps7", v);
  r.rho3 = std::pow(dl * r.eps8 / 30.0, 1.5);
  r.eps9 = r.eps6 + 1500.0 * rho * dl * lam2 + 25.0 * w * w * rho * dl * lam2;
  r.kappa5 = 100.0 * dl * w * lam2 + 1500.0 * rho * dl * lam2 + 25.0 * dl * w * w * rho * lam2;

  r.a1 = -dl + 45.0 * rho * lam2 / (w * dl);
  r.a2 = -4.0 / 5.0 + rho - rho * w / 4.0 + 9.0 * rho * lam2 / (dl * dl);
  r.b1 = rate_b1(rho, dl, in.lambda, w);
  r.b2 = r.a2 - w / 4.0;

  const double disc_a = checked_sqrt(r.a2 * r.a2 - 24.0 * r.a1 * rho / dl,
                                     "a2^2 - 24 a1 rho / delta", v);
  if (r.a1 == 0.0) {
    v.push_back("a1 = 0 (m1 divides by -2 a1)");
    r.m1 = kNaN;
  } else {
    r.m1 = (r.a2 + disc_a) / (-2.0 * r.a1);
  }
  r.m2 = checked_cbrt(12.0 * rho * w * w * w / r.eps9, "12 rho omega^3 / eps9", v);
  const double disc_b = checked_sqrt(r.b2 * r.b2 - 24.0 * r.b1 * rho / dl,
                                     "b2^2 - 24 b1 rho / delta", v);
  r.m3 = (-r.b2 - disc_b) / (2.0 * r.b1);
  r.m41 = (-r.b2 + disc_b) / (2.0 * r.b1);
  r.m42 = checked_cbrt(12.0 * rho * w * w * w / r.kappa5, "12 rho omega^3 / kappa5", v);
  r.m4 = std::min(r.m41, r.m42);
  if (std::isnan(r.m41) || std::isnan(r.m42)) r.m4 = kNaN;

  const double ob = 1.0 - b, ob2 = ob * ob;
  const double n = in.n;
  k.c[0] = 5.0 * n * in.d * in.lf2 * in.sigma1 * std::pow(b, 4) / ob;
  k.c[1] = 4.0 * in.d * in.d * in.sigma1 * in.sigma1 * std::pow(in.lf2, 4) / n;
  k.c[2] = 320.0 * n * ob2 * r.eps0 * d2s2l2 / ((16.0 + 5.0 * w) * gg2);
  k.c[3] = 720.0 * n * lam2 * d2s2l2 * ob2 / (gg2 * w * dl * dl);
  k.c[4] = 40.0 * n * ob2 * r.eps0 * d2s2l2 / gg2;
  // Single (1 - β) as printed; the corollary's squared form is smaller.
  k.c[5] = 192.0 * w * w * w * n * d2s2l2 * ob / (gg2 * std::pow(r.eps5, 3) * r.eps6);
  k.c[6] = 16.0 * n * ob2 * d2s2l2 / (gg2 * std::pow(dl * r.eps8 / 30.0, 1.5));

  const double e2 = in.eta * in.eta * d2s2l2;
  k.gamma_tilde[0] = std::sqrt(40.0 * r.eps0 * e2);
  k.gamma_tilde[1] = std::sqrt(192.0 * w * w * w * e2 / (std::pow(r.eps5, 3) * r.eps6));
  k.gamma_tilde[2] =
      4.0 * in.eta * in.d * in.sigma2 * in.lf1 / std::pow(dl * r.eps8 / 30.0, 0.75);

  k.contraction = std::max(k.lemma.ell1, k.lemma.ell2) + rho * k.lemma.ell3;
  return k;
}

TheoremConstants compute_constants(const TheoremInputs& in) {
  TheoremConstants k = evaluate_constants(in);
  if (!k.domain_violations.empty()) throw DomainError(k.domain_violations.front());
  return k;
}

bool TheoremReport::passed() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const Condition& c) { return c.passed; });
}

std::vector<std::string> TheoremReport::violated() const {
  std::vector<std::string> out;
  for (const auto& c : conditions)
    if (!c.passed) out.push_back(c.name);
  return out;
}

std::string TheoremReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : conditions)
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  for (const auto& c : diagnostics)
    os << (c.passed ? "info ok   " : "info fail ") << c.name << ": " << c.detail << '\n';
  return os.str();
}

TheoremReport check_theorem1(const TheoremConstants& k, const TheoremInputs& in) {
  TheoremReport rep;
  const auto fmt = format_number;
  const double lo = k.gamma_x_low(), hi = k.gamma_x_high();
  const bool m_ok = std::isfinite(lo) && std::isfinite(hi);

  rep.conditions.push_back({"gamma_x_lower", m_ok && in.gamma_x > lo,
                            "gamma_x = " + fmt(in.gamma_x) + " > max{m1,m3} = " + fmt(lo)});
  rep.conditions.push_back({"gamma_x_upper", m_ok && in.gamma_x < hi,
                            "gamma_x = " + fmt(in.gamma_x) + " < min{m2,m4} = " + fmt(hi)});
  rep.conditions.push_back(
      {"gamma_x_interval", m_ok && lo < hi, "(" + fmt(lo) + ", " + fmt(hi) + ") nonempty"});
  rep.conditions.push_back({"gamma_x_delta", in.gamma_x * in.delta <= 1.0,
                            "gamma_x * delta = " + fmt(in.gamma_x * in.delta) + " <= 1"});

  const double gmax = *std::max_element(k.gamma_tilde, k.gamma_tilde + 3);
  rep.conditions.push_back({"gamma_g_lower", in.gamma_g >= gmax,
                            "gamma_g = " + fmt(in.gamma_g) + " >= " + fmt(gmax)});

  std::string missing;
  for (int i = 0; i < 7; ++i)
    if (!(in.T >= k.c[i])) missing += " c" + std::to_string(i + 1) + "=" + fmt(k.c[i]);
  const double cmax = *std::max_element(k.c, k.c + 7);
  rep.conditions.push_back({"T_lower", missing.empty(),
                            "T = " + fmt(in.T) + " >= max c = " + fmt(cmax) +
                                (missing.empty() ? "" : "; below" + missing)});

  const double eta_rule = (1.0 - in.beta) * std::sqrt(in.n / in.T);
  const bool eta_ok =
      !in.horizon_rule || std::abs(in.eta - eta_rule) <= 1e-12 * std::max(1.0, eta_rule);
  rep.conditions.push_back(
      {"eta_rule", eta_ok, "eta = " + fmt(in.eta) + ", (1-beta) sqrt(n/T) = " + fmt(eta_rule)});

  for (const auto& msg : k.domain_violations) rep.conditions.push_back({"domain", false, msg});

  rep.diagnostics.push_back({"contraction", k.contraction < 0.9,
                             "max{l1,l2} + rho l3 = " + fmt(k.contraction) + " < 0.9"});
  rep.diagnostics.push_back(
      {"rho_le_rho0", k.rate.rho <= k.rate.rho0,
       "rho = " + fmt(k.rate.rho) + " <= rho0 = " + fmt(k.rate.rho0)});
  rep.diagnostics.push_back({"conditional_constants", true,
                             "L_f1 = " + fmt(in.lf1) + ", L_f2 = " + fmt(in.lf2) +
                                 ", gamma1 = " + fmt(in.gamma1) + " as supplied"});
  return rep;
}

CorollaryThresholds corollary_thresholds(const TheoremInputs& in) {
  if (!(in.T >= 2.0)) throw std::invalid_argument("corollary needs T >= 2");
  TheoremInputs at = in;
  at.gamma_g = std::pow(in.T, -0.125);
  const TheoremConstants k = evaluate_constants(at);

  const double w = in.omega, dl = in.delta, n = in.n;
  const double ob2 = (1.0 - in.beta) * (1.0 - in.beta);
  const double lam2 = in.lambda * in.lambda;
  const double d2s2l2 = in.d * in.d * in.sigma2 * in.sigma2 * in.lf1 * in.lf1;
  const double e0 = k.rate.eps0;
  const auto p43 = [](double v) { return std::pow(v, 4.0 / 3.0); };

  CorollaryThresholds c;
  c.gamma_g = at.gamma_g;
  c.c1 = k.c[0];
  c.c2 = k.c[1];
  c.c_tilde[0] = p43(320.0 * n * ob2 * e0 * d2s2l2 / (16.0 + 5.0 * w));
  c.c_tilde[1] = p43(720.0 * n * lam2 * d2s2l2 * ob2 / (w * dl * dl));
  c.c_tilde[2] = p43(40.0 * n * ob2 * e0 * d2s2l2);
  c.c_tilde[3] =
      p43(192.0 * n * ob2 * w * w * w * d2s2l2 / (std::pow(k.rate.eps5, 3) * k.rate.eps6));
  c.c_tilde[4] = p43(16.0 * n * d2s2l2 * ob2 / std::pow(dl * k.rate.eps8 / 30.0, 1.5));
  return c;
}

TheoremReport check_corollary1(const TheoremInputs& in) {
  const CorollaryThresholds c = corollary_thresholds(in);
  TheoremReport rep;
  const auto add = [&](const std::string& name, double bound) {
    rep.conditions.push_back(
        {name, in.T >= bound, "T = " + format_number(in.T) + " >= " + format_number(bound)});
  };
  add("c1", c.c1);
  add("c2", c.c2);
  for (int i = 0; i < 5; ++i) add("c" + std::to_string(i + 3) + "_tilde", c.c_tilde[i]);
  rep.diagnostics.push_back({"gamma_g", true, "T^(-1/8) = " + format_number(c.gamma_g)});
  return rep;
}

std::string format_ledger(const TheoremConstants& k) {
  std::ostringstream os;
  const auto row = [&](const char* name, double v) { os << name << " = " << format_number(v) << '\n'; };
  const LemmaConstants& l = k.lemma;
  row("alpha1", l.alpha1);
  row("alpha2", l.alpha2);
  row("alpha3", l.alpha3);
  row("alpha6", l.alpha6);
  row("lemma.eps1", l.eps1);
  row("lemma.eps2", l.eps2);
  row("lemma.eps3", l.eps3);
  row("lemma.eps4", l.eps4);
  row("kappa1", l.kappa1);
  row("kappa2", l.kappa2);
  row("kappa3", l.kappa3);
  row("ell1", l.ell1);
  row("ell2", l.ell2);
  row("ell3", l.ell3);
  row("kappa4", k.kappa4);
  const RateConstants& r = k.rate;
  row("rho", r.rho);
  row("eps0", r.eps0);
  row("rate.eps1", r.eps1);
  row("rate.eps2", r.eps2);
  row("rate.eps4", r.eps4);
  row("eps5", r.eps5);
  row("eps6", r.eps6);
  row("eps7", r.eps7);
  row("eps8", r.eps8);
  row("eps9", r.eps9);
  row("kappa5", r.kappa5);
  row("rho0", r.rho0);
  row("rho1", r.rho1);
  row("rho2", r.rho2);
  row("rho3", r.rho3);
  row("a1", r.a1);
  row("a2", r.a2);
  row("b1", r.b1);
  row("b2", r.b2);
  row("m1", r.m1);
  row("m2", r.m2);
  row("m3", r.m3);
  row("m4_1", r.m41);
  row("m4_2", r.m42);
  row("m4", r.m4);
  for (int i = 0; i < 7; ++i) os << 'c' << i + 1 << " = " << format_number(k.c[i]) << '\n';
  for (int i = 0; i < 3; ++i)
    os << "gamma_tilde" << i + 1 << " = " << format_number(k.gamma_tilde[i]) << '\n';
  row("contraction", k.contraction);
  for (const auto& msg : k.domain_violations) os << "domain violation: " << msg << '\n';
  return os.str();
}

}  // namespace cmsgd
