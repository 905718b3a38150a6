#include "cmsgd/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cmsgd {

double AlgorithmConfig::step_size() const {
  if (eta_rule == EtaRule::fixed) return eta;
  if (horizon == 0) throw std::invalid_argument("eta_rule=horizon needs T >= 1");
  return (1.0 - beta) *
         std::sqrt(static_cast<double>(agents()) / static_cast<double>(horizon));
}

void AlgorithmConfig::validate() const {
  if (agents() == 0) throw std::invalid_argument("mixing matrix is empty");
  if (!(gamma_x > 0.0)) throw std::invalid_argument("gamma_x must be > 0");
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
  if (eta_rule == EtaRule::fixed && !(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  if (!(zo.gamma_g > 0.0)) throw std::invalid_argument("gamma_g must be > 0");
  if (!(zo.noise_var >= 0.0)) throw std::invalid_argument("noise_var must be >= 0");
  if (!(divergence_cap > 0.0)) throw std::invalid_argument("divergence cap must be > 0");
}

AgentStreams AgentStreams::from_seed(std::uint64_t seed, std::size_t n) {
  AgentStreams s;
  s.agents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) s.agents.push_back(make_stream(seed, StreamKind::agent, i));
  return s;
}

NetworkState init(const AlgorithmConfig& cfg, const Matrix& x0) {
  if (static_cast<std::size_t>(x0.rows()) != cfg.agents())
    throw std::invalid_argument("x0 must have one row per agent");
  if (!x0.allFinite()) throw std::invalid_argument("x0 must be finite");
  NetworkState s;
  s.x = x0;
  s.m = Matrix::Zero(x0.rows(), x0.cols());
  s.x_hat = Matrix::Zero(x0.rows(), x0.cols());
  s.t = 0;
  return s;
}

Matrix initial_point(std::size_t n, std::size_t d, bool normal, std::uint64_t seed) {
  Matrix x0 = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  if (!normal) return x0;
  Rng rng = make_stream(seed, StreamKind::init);
  std::normal_distribution<double> dist;
  for (Eigen::Index i = 0; i < x0.rows(); ++i)
    for (Eigen::Index j = 0; j < x0.cols(); ++j) x0(i, j) = dist(rng);
  return x0;
}

namespace detail {

void local_update(std::size_t i, NetworkState& state, const AlgorithmConfig& cfg, double eta,
                  const LocalObjective& objective, Rng& rng, StepRecord& rec) {
  const auto r = static_cast<Eigen::Index>(i);
  const Vector x = state.x.row(r).transpose();
  const DataSample xi = objective.sample_data(rng);
  const OnePointSample est =
      one_point_gradient([&](const Vector& p) { return objective.query(p, xi); }, x, cfg.zo, rng);

  const Vector m = cfg.beta * state.m.row(r).transpose() + est.g;
  const Vector x_half = x - eta * (cfg.beta * m + est.g);
  const Vector diff = x_half - state.x_hat.row(r).transpose();
  Vector c;
  compress_into(cfg.compressor, diff, rng, c);

  state.m.row(r) = m.transpose();
  if (cfg.compressor.lossless()) {
    // x̂ + (x_half - x̂) can differ from x_half in the last bit.
    state.x_hat.row(r) = x_half.transpose();
  } else {
    state.x_hat.row(r) += c.transpose();
  }
  rec.g.row(r) = est.g.transpose();
  rec.x_half.row(r) = x_half.transpose();
  rec.messages.row(r) = c.transpose();
}

void consensus_row(std::size_t i, const NetworkState& state, const AlgorithmConfig& cfg,
                   const Matrix& x_half, Matrix& x_next) {
  const auto r = static_cast<Eigen::Index>(i);
  const Matrix& w = cfg.mixing.weights;
  const auto d = state.x_hat.cols();
  for (Eigen::Index c = 0; c < d; ++c) {
    const double own = state.x_hat(r, c);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (j == r || w(r, j) == 0.0) continue;
      acc += w(r, j) * (state.x_hat(j, c) - own);
    }
    x_next(r, c) = x_half(r, c) + cfg.gamma_x * acc;
  }
}

void check_finite(const NetworkState& state, const AlgorithmConfig& cfg, std::size_t t) {
  const auto bad = [&](const Matrix& a) {
    return !a.allFinite() || a.cwiseAbs().maxCoeff() > cfg.divergence_cap;
  };
  if (bad(state.x) || bad(state.m) || bad(state.x_hat))
    throw NumericalDivergence(t, "state left the divergence cap at iteration " + std::to_string(t));
}

void check_inputs(const NetworkState& state, const AlgorithmConfig& cfg,
                  const ObjectiveSet& objectives, const AgentStreams& streams) {
  const std::size_t n = cfg.agents();
  if (static_cast<std::size_t>(state.x.rows()) != n || objectives.size() != n ||
      streams.agents.size() != n)
    throw std::invalid_argument("state, objectives and streams must all have one entry per agent");
  if (cfg.horizon != 0 && state.t >= cfg.horizon)
    throw std::invalid_argument("step called at t >= T");
}

}  // namespace detail

StepRecord step(NetworkState& state, const AlgorithmConfig& cfg, const ObjectiveSet& objectives,
                AgentStreams& streams) {
  detail::check_inputs(state, cfg, objectives, streams);
  const auto n = static_cast<std::ptrdiff_t>(cfg.agents());
  const auto d = state.x.cols();
  const double eta = cfg.step_size();

  StepRecord rec;
  rec.t = state.t;
  rec.g.resize(n, d);
  rec.x_half.resize(n, d);
  rec.messages.resize(n, d);

  // Each agent touches only its own row and its own stream, so the
  // exception is the only shared state.
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      detail::local_update(static_cast<std::size_t>(i), state, cfg, eta, *objectives[i],
                           streams.agents[i], rec);
    } catch (...) {
#pragma omp critical(cmsgd_step_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  Matrix x_next(n, d);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    detail::consensus_row(static_cast<std::size_t>(i), state, cfg, rec.x_half, x_next);

  state.x = std::move(x_next);
  rec.bits = static_cast<std::int64_t>(n) *
             bit_cost(cfg.compressor, static_cast<std::size_t>(d));
  detail::check_finite(state, cfg, state.t);
  ++state.t;
  return rec;
}

void run(NetworkState& state, const AlgorithmConfig& cfg, const ObjectiveSet& objectives,
         AgentStreams& streams, const StepObserver& observer) {
  while (state.t < cfg.horizon) {
    const StepRecord rec = step(state, cfg, objectives, streams);
    if (observer) observer(state, rec);
  }
}

}  // namespace cmsgd
