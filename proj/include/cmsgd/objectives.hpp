#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "cmsgd/types.hpp"

namespace cmsgd {

/// One draw of local data ξ. The logistic benchmark fills features/labels;
/// the quadratic objective uses `noise`.
struct DataSample {
  Matrix features;  // one row per observation
  Vector labels;    // ±1
  double noise = 0.0;
};

/// Constants of Assumptions 1-2 and the second-moment bound, as used by the
/// theorem validator. For the logistic benchmark these are estimates.
struct ObjectiveConstants {
  double lipschitz = 1.0;      // L_f1
  double hessian_bound = 1.0;  // L_f2 (also used as ϑ1)
  double value_bound = 1.0;    // γ1
};

class LocalObjective {
 public:
  virtual ~LocalObjective() = default;

  virtual std::size_t dimension() const = 0;
  /// Draws ξ.
  virtual DataSample sample_data(Rng& rng) const = 0;
  /// f_i(x, ξ).
  virtual double query(const Vector& x, const DataSample& xi) const = 0;
  /// ∇F_i(x) of the expected objective, estimated on a fresh batch of
  /// `eval_batch` observations where the objective is not known in closed form.
  virtual Vector expected_gradient(const Vector& x, std::size_t eval_batch, Rng& rng) const = 0;
  virtual ObjectiveConstants constants() const = 0;
};

using ObjectiveSet = std::vector<std::shared_ptr<const LocalObjective>>;

/// log(1 + e^z) without overflow.
double log1p_exp(double z);

/// Σ_ι ϖ κ x_ι^2 / (1 + κ x_ι^2).
double nonconvex_regularizer(const Vector& x, double varpi, double kappa);
Vector nonconvex_regularizer_gradient(const Vector& x, double varpi, double kappa);

struct LogisticParams {
  std::size_t dimension = 30;
  std::size_t samples = 200;  // m_i per query
  double varpi = 0.001;
  double kappa = 1.0;
  bool mean_loss = false;  // divide the query's data term by the batch size
};

/// Nonconvex binary classification: f(x, ξ) = Σ_j log(1 + exp(-q_j p_j^T x)) + ℏ2(x)
/// with Gaussian features p_j regenerated on every draw and labels
/// q_j = sign(p_j^T x★) from a planted unit separator.
class LogisticBenchmark final : public LocalObjective {
 public:
  LogisticBenchmark(LogisticParams params, Vector planted);

  std::size_t dimension() const override { return params_.dimension; }
  DataSample sample_data(Rng& rng) const override;
  double query(const Vector& x, const DataSample& xi) const override;
  Vector expected_gradient(const Vector& x, std::size_t eval_batch, Rng& rng) const override;
  ObjectiveConstants constants() const override;

  /// Draws `count` labelled observations.
  DataSample sample_batch(std::size_t count, Rng& rng) const;
  /// data_weight()-scaled batch-mean loss plus regularizer: an unbiased estimate of F_i.
  double loss_on_batch(const Vector& x, const DataSample& batch) const;
  /// Analytic gradient of loss_on_batch.
  Vector gradient_on_batch(const Vector& x, const DataSample& batch) const;

  /// Weight of the data term in F_i: m_i for the summed loss, 1 for the mean.
  double data_weight() const;

  const LogisticParams& params() const { return params_; }
  const Vector& planted() const { return planted_; }

 private:
  LogisticParams params_;
  Vector planted_;
};

/// Unit-norm planted separator derived from `planted_seed`.
Vector planted_separator(std::size_t d, std::uint64_t planted_seed);

/// F_i(x) = ½ x^T A x - b^T x; each query adds N(0, noise_var) sample noise.
class QuadraticObjective final : public LocalObjective {
 public:
  QuadraticObjective(Matrix a, Vector b, double noise_var);

  std::size_t dimension() const override { return static_cast<std::size_t>(b_.size()); }
  DataSample sample_data(Rng& rng) const override;
  double query(const Vector& x, const DataSample& xi) const override;
  Vector expected_gradient(const Vector& x, std::size_t eval_batch, Rng& rng) const override;
  ObjectiveConstants constants() const override;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  const Matrix& hessian() const { return a_; }
  const Vector& linear() const { return b_; }

 private:
  Matrix a_;
  Vector b_;
  double noise_var_;
  double hessian_norm_;
};

struct QuadraticParams {
  std::size_t dimension = 4;
  double eig_min = 0.5;
  double eig_max = 1.5;
  double b_scale = 1.0;    // b_i ~ N(0, b_scale^2 I)
  double noise_var = 0.0;  // per-query sample noise
};

/// n random quadratics A_i = Q_i diag(U[eig_min, eig_max]) Q_i^T, b_i Gaussian.
ObjectiveSet make_quadratic_network(std::size_t n, const QuadraticParams& params,
                                    std::uint64_t seed);

/// Minimizer of (1/n) Σ F_i, i.e. the solution of Ā x = b̄.
Vector quadratic_global_minimizer(const ObjectiveSet& objectives);

/// ∇f(x) = (1/n) Σ ∇F_i(x).
Vector average_gradient(const ObjectiveSet& objectives, const Vector& x, std::size_t eval_batch,
                        Rng& rng);

}  // namespace cmsgd
