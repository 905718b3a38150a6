#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

#include "cmsgd/engine.hpp"
#include "cmsgd/objectives.hpp"

namespace cmsgd {

struct MetricsRow {
  std::size_t t = 0;
  double consensus_err = 0.0;  // (1/n) Σ ||x_i - x̄||^2
  double grad_sq = 0.0;        // ||(1/n) Σ ∇F_i(x̄)||^2
  double chi = 0.0;            // ||x - x̄||_F^2 + ||x - x̂||_F^2
  double p_metric = 0.0;       // running min of grad_sq + consensus_err
  std::int64_t bits_cum = 0;
};

inline constexpr const char* kMetricsHeader = "t,consensus_err,grad_sq,chi,p_metric,bits_cum";

/// Row of the current state; p_metric here is grad_sq + consensus_err
/// without the running minimum.
MetricsRow compute_metrics(const NetworkState& state, const ObjectiveSet& objectives,
                           std::size_t eval_batch, Rng& rng);

/// Folds iterations into rows: accumulates bits every step, emits a row
/// every `stride` steps and keeps the running minimum.
class MetricsTracker {
 public:
  MetricsTracker(const ObjectiveSet& objectives, std::size_t eval_batch, std::size_t stride,
                 Rng rng);

  /// Returns true when a row was recorded for this step.
  bool observe(const NetworkState& state, const StepRecord& record);

  const std::vector<MetricsRow>& rows() const { return rows_; }
  std::int64_t bits_cum() const { return bits_cum_; }

 private:
  const ObjectiveSet& objectives_;
  std::size_t eval_batch_;
  std::size_t stride_;
  Rng rng_;
  std::int64_t bits_cum_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<MetricsRow> rows_;
};

/// "%.17g" text, round-trip exact.
std::string format_number(double v);

}  // namespace cmsgd
