#include "cmsgd/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace cmsgd {

double log1p_exp(double z) {
  // max(z, 0) + log1p(exp(-|z|)) never overflows.
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double nonconvex_regularizer(const Vector& x, double varpi, double kappa) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double sq = kappa * x(i) * x(i);
    acc += varpi * sq / (1.0 + sq);
  }
  return acc;
}

Vector nonconvex_regularizer_gradient(const Vector& x, double varpi, double kappa) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double denom = 1.0 + kappa * x(i) * x(i);
    g(i) = 2.0 * varpi * kappa * x(i) / (denom * denom);
  }
  return g;
}

Vector planted_separator(std::size_t d, std::uint64_t planted_seed) {
  Rng rng = make_stream(planted_seed, StreamKind::planted);
  std::normal_distribution<double> normal;
  Vector v(d);
  do {
    for (std::size_t i = 0; i < d; ++i) v(i) = normal(rng);
  } while (v.squaredNorm() == 0.0);
  return v / v.norm();
}

// ---------------------------------------------------------------------------

LogisticBenchmark::LogisticBenchmark(LogisticParams params, Vector planted)
    : params_(params), planted_(std::move(planted)) {
  if (params_.dimension == 0 || params_.samples == 0)
    throw std::invalid_argument("logistic benchmark needs d >= 1 and m_i >= 1");
  if (static_cast<std::size_t>(planted_.size()) != params_.dimension)
    throw std::invalid_argument("planted separator dimension mismatch");
}

DataSample LogisticBenchmark::sample_batch(std::size_t count, Rng& rng) const {
  const auto d = params_.dimension;
  std::normal_distribution<double> normal;
  DataSample s;
  s.features.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
  s.labels.resize(static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    double margin = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double v = normal(rng);
      s.features(j, c) = v;
      margin += v * planted_(c);
    }
    s.labels(j) = margin >= 0.0 ? 1.0 : -1.0;
  }
  return s;
}

DataSample LogisticBenchmark::sample_data(Rng& rng) const {
  return sample_batch(params_.samples, rng);
}

double LogisticBenchmark::query(const Vector& x, const DataSample& xi) const {
  if (xi.features.rows() == 0) throw QueryFailure("logistic query on an empty batch");
  const Vector z = xi.features * x;
  double loss = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) loss += log1p_exp(-xi.labels(j) * z(j));
  if (params_.mean_loss) loss /= static_cast<double>(z.size());
  return loss + nonconvex_regularizer(x, params_.varpi, params_.kappa);
}

double LogisticBenchmark::loss_on_batch(const Vector& x, const DataSample& batch) const {
  const Vector z = batch.features * x;
  double loss = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) loss += log1p_exp(-batch.labels(j) * z(j));
  const double scale = data_weight() / static_cast<double>(z.size());
  return scale * loss + nonconvex_regularizer(x, params_.varpi, params_.kappa);
}

Vector LogisticBenchmark::gradient_on_batch(const Vector& x, const DataSample& batch) const {
  const Vector z = batch.features * x;
  // d/dx log(1 + e^{-q p^T x}) = -q p e^{-z} / (1 + e^{-z}) with z = q p^T x.
  Vector weights(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double margin = batch.labels(j) * z(j);
    const double sigma_neg = 1.0 / (1.0 + std::exp(margin));
    weights(j) = -batch.labels(j) * sigma_neg;
  }
  const double scale = data_weight() / static_cast<double>(z.size());
  Vector g = scale * (batch.features.transpose() * weights);
  g += nonconvex_regularizer_gradient(x, params_.varpi, params_.kappa);
  return g;
}

Vector LogisticBenchmark::expected_gradient(const Vector& x, std::size_t eval_batch,
                                            Rng& rng) const {
  if (eval_batch == 0) throw std::invalid_argument("eval batch must be >= 1");
  return gradient_on_batch(x, sample_batch(eval_batch, rng));
}

double LogisticBenchmark::data_weight() const {
  return params_.mean_loss ? 1.0 : static_cast<double>(params_.samples);
}

ObjectiveConstants LogisticBenchmark::constants() const {
  const double m = data_weight();
  const double d = static_cast<double>(params_.dimension);
  const double reg_slope = params_.varpi * std::sqrt(params_.kappa) * 9.0 / (8.0 * std::sqrt(3.0));
  ObjectiveConstants c;
  // Lipschitz of the batch loss: Σ_j ||p_j|| with E||p|| ~ sqrt(d).
  c.lipschitz = m * std::sqrt(d) + std::sqrt(d) * reg_slope;
  // σ(z)(1 - σ(z)) <= 1/4 and E[p p^T] = I; the regularizer curvature peaks at 2ϖκ.
  c.hessian_bound = m / 4.0 + 2.0 * params_.varpi * params_.kappa;
  // Value at the origin plus the regularizer cap.
  c.value_bound = m * std::log(2.0) + params_.varpi * d;
  return c;
}

// ---------------------------------------------------------------------------

QuadraticObjective::QuadraticObjective(Matrix a, Vector b, double noise_var)
    : a_(std::move(a)), b_(std::move(b)), noise_var_(noise_var) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size())
    throw std::invalid_argument("quadratic objective shape mismatch");
  if (!a_.isApprox(a_.transpose(), 1e-12) && a_.norm() > 0.0)
    throw std::invalid_argument("quadratic Hessian must be symmetric");
  if (noise_var_ < 0.0) throw std::invalid_argument("noise variance must be >= 0");
  if (a_.rows() == 0) {
    hessian_norm_ = 0.0;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(a_), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12)
    throw std::invalid_argument("quadratic Hessian must be positive semidefinite");
  hessian_norm_ = eig.eigenvalues().cwiseAbs().maxCoeff();
}

DataSample QuadraticObjective::sample_data(Rng& rng) const {
  std::normal_distribution<double> normal;
  DataSample s;
  s.noise = std::sqrt(noise_var_) * normal(rng);
  return s;
}

double QuadraticObjective::value(const Vector& x) const {
  return 0.5 * x.dot(a_ * x) - b_.dot(x);
}

Vector QuadraticObjective::gradient(const Vector& x) const { return a_ * x - b_; }

double QuadraticObjective::query(const Vector& x, const DataSample& xi) const {
  return value(x) + xi.noise;
}

Vector QuadraticObjective::expected_gradient(const Vector& x, std::size_t, Rng&) const {
  return gradient(x);
}

ObjectiveConstants QuadraticObjective::constants() const {
  ObjectiveConstants c;
  c.hessian_bound = hessian_norm_;
  // Quadratics are not globally Lipschitz; these describe the unit ball.
  c.lipschitz = hessian_norm_ + b_.norm();
  c.value_bound = 0.5 * hessian_norm_ + b_.norm() + std::sqrt(noise_var_);
  return c;
}

ObjectiveSet make_quadratic_network(std::size_t n, const QuadraticParams& params,
                                    std::uint64_t seed) {
  if (params.eig_min < 0.0 || params.eig_max < params.eig_min)
    throw std::invalid_argument("quadratic eigenvalue range must satisfy 0 <= min <= max");
  const auto d = static_cast<Eigen::Index>(params.dimension);
  ObjectiveSet out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_stream(seed, StreamKind::problem, i);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> spread(params.eig_min, params.eig_max);
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) g(r, c) = normal(rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Eigen::VectorXd eigs(d);
    for (Eigen::Index r = 0; r < d; ++r) eigs(r) = spread(rng);
    Eigen::MatrixXd a = q * eigs.asDiagonal() * q.transpose();
    a = 0.5 * (a + a.transpose()).eval();
    Vector b(d);
    for (Eigen::Index r = 0; r < d; ++r) b(r) = params.b_scale * normal(rng);
    out.push_back(std::make_shared<QuadraticObjective>(Matrix(a), b, params.noise_var));
  }
  return out;
}

Vector quadratic_global_minimizer(const ObjectiveSet& objectives) {
  if (objectives.empty()) throw std::invalid_argument("no objectives");
  const auto d = static_cast<Eigen::Index>(objectives.front()->dimension());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  for (const auto& obj : objectives) {
    const auto* quad = dynamic_cast<const QuadraticObjective*>(obj.get());
    if (quad == nullptr) throw std::invalid_argument("global minimizer needs quadratic objectives");
    a += quad->hessian();
    b += quad->linear();
  }
  return a.ldlt().solve(b);
}

Vector average_gradient(const ObjectiveSet& objectives, const Vector& x, std::size_t eval_batch,
                        Rng& rng) {
  Vector g = Vector::Zero(x.size());
  for (const auto& obj : objectives) g += obj->expected_gradient(x, eval_batch, rng);
  return g / static_cast<double>(objectives.size());
}

}  // namespace cmsgd
