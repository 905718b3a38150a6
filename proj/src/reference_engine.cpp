#include "cmsgd/engine.hpp"

namespace cmsgd::reference {

StepRecord step(NetworkState& state, const AlgorithmConfig& cfg, const ObjectiveSet& objectives,
                AgentStreams& streams) {
  detail::check_inputs(state, cfg, objectives, streams);
  const std::size_t n = cfg.agents();
  const auto d = state.x.cols();
  const double eta = cfg.step_size();

  StepRecord rec;
  rec.t = state.t;
  rec.g.resize(static_cast<Eigen::Index>(n), d);
  rec.x_half.resize(static_cast<Eigen::Index>(n), d);
  rec.messages.resize(static_cast<Eigen::Index>(n), d);

  for (std::size_t i = 0; i < n; ++i)
    detail::local_update(i, state, cfg, eta, *objectives[i], streams.agents[i], rec);

  Matrix x_next(static_cast<Eigen::Index>(n), d);
  for (std::size_t i = 0; i < n; ++i) detail::consensus_row(i, state, cfg, rec.x_half, x_next);

  state.x = std::move(x_next);
  rec.bits = static_cast<std::int64_t>(n) * bit_cost(cfg.compressor, static_cast<std::size_t>(d));
  detail::check_finite(state, cfg, state.t);
  ++state.t;
  return rec;
}

}  // namespace cmsgd::reference
