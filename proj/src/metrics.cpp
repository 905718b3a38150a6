#include "cmsgd/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace cmsgd {

MetricsRow compute_metrics(const NetworkState& state, const ObjectiveSet& objectives,
                           std::size_t eval_batch, Rng& rng) {
  if (eval_batch == 0) throw std::invalid_argument("metric eval batch must be >= 1");
  const auto n = static_cast<double>(state.x.rows());
  const Vector mean = state.x.colwise().mean().transpose();
  const Matrix centered = state.x.rowwise() - mean.transpose();
  const double spread = centered.squaredNorm();

  MetricsRow row;
  row.t = state.t;
  row.consensus_err = spread / n;
  row.chi = spread + (state.x - state.x_hat).squaredNorm();
  row.grad_sq = average_gradient(objectives, mean, eval_batch, rng).squaredNorm();
  row.p_metric = row.grad_sq + row.consensus_err;
  return row;
}

MetricsTracker::MetricsTracker(const ObjectiveSet& objectives, std::size_t eval_batch,
                               std::size_t stride, Rng rng)
    : objectives_(objectives), eval_batch_(eval_batch), stride_(stride), rng_(std::move(rng)) {
  if (stride_ == 0) throw std::invalid_argument("metric stride must be >= 1");
  if (eval_batch_ == 0) throw std::invalid_argument("metric eval batch must be >= 1");
}

bool MetricsTracker::observe(const NetworkState& state, const StepRecord& record) {
  bits_cum_ += record.bits;
  if (state.t % stride_ != 0) return false;
  MetricsRow row = compute_metrics(state, objectives_, eval_batch_, rng_);
  best_ = std::min(best_, row.p_metric);
  row.p_metric = best_;
  row.bits_cum = bits_cum_;
  rows_.push_back(row);
  return true;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace cmsgd
