#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cmsgd/config.hpp"
#include "cmsgd/metrics.hpp"

namespace cmsgd {

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<MetricsRow> rows;
  std::optional<std::size_t> diverged_at;
  std::string failure;  // divergence message
};

struct AggregateRow {
  MetricsRow mean;
  std::size_t n_seeds = 0;
};

struct ExperimentResult {
  std::vector<RunResult> runs;  // in cfg.seeds order
  std::vector<AggregateRow> aggregate;

  std::size_t converged_runs() const;
};

/// One seeded run, no file output. Divergence is captured, not thrown.
RunResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

/// Per-row arithmetic mean over the runs that did not diverge.
std::vector<AggregateRow> aggregate_runs(const std::vector<RunResult>& runs);

/// Runs every seed (concurrently) and aggregates. With a non-empty `out_dir`
/// writes seed_<k>.csv, aggregate.csv and config.txt there. Diverged seeds
/// produce a warning on `warn`.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                std::ostream* warn = nullptr);

void write_run_csv(std::ostream& os, const RunResult& run);
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows);

struct SweepPoint {
  std::string value;
  ExperimentResult result;
  double final_p_metric = 0.0;        // NaN when every seed diverged
  double final_consensus_err = 0.0;
  double bits_cum = 0.0;
};

inline constexpr const char* kSweepHeader = "value,final_p_metric,final_consensus_err,bits_cum";

/// Parameters a sweep may vary.
bool sweepable(const std::string& param);

/// One experiment per value with identical seeds. With a non-empty `out_dir`
/// each point writes into <out_dir>/<param>_<value>/ and the summary goes to
/// <out_dir>/sweep_summary.csv.
std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const std::string& param,
                              const std::vector<std::string>& values, const std::string& out_dir,
                              std::ostream* warn = nullptr);

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points);

}  // namespace cmsgd
