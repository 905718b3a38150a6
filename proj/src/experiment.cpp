#include "cmsgd/experiment.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace cmsgd {

namespace fs = std::filesystem;

namespace {

void write_row(std::ostream& os, const MetricsRow& r) {
  os << r.t << ',' << format_number(r.consensus_err) << ',' << format_number(r.grad_sq) << ','
     << format_number(r.chi) << ',' << format_number(r.p_metric) << ',' << r.bits_cum;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  return f;
}

}  // namespace

std::size_t ExperimentResult::converged_runs() const {
  std::size_t k = 0;
  for (const auto& r : runs)
    if (!r.diverged_at) ++k;
  return k;
}

RunResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const MixingMatrix mixing = mixing_for(cfg);
  const ObjectiveSet objectives = objectives_for(cfg);
  const AlgorithmConfig alg = algorithm_for(cfg, mixing);

  RunResult result;
  result.seed = seed;
  NetworkState state = init(alg, initial_point(cfg.n, cfg.dimension(), cfg.x0_normal, seed));
  AgentStreams streams = AgentStreams::from_seed(seed, cfg.n);
  MetricsTracker tracker(objectives, cfg.metric_eval_batch, cfg.metric_every,
                         make_stream(seed, StreamKind::metrics));
  try {
    run(state, alg, objectives, streams,
        [&](const NetworkState& s, const StepRecord& rec) { tracker.observe(s, rec); });
  } catch (const NumericalDivergence& e) {
    result.diverged_at = e.iteration;
    result.failure = e.what();
  }
  result.rows = tracker.rows();
  return result;
}

std::vector<AggregateRow> aggregate_runs(const std::vector<RunResult>& runs) {
  std::vector<const RunResult*> ok;
  for (const auto& r : runs)
    if (!r.diverged_at) ok.push_back(&r);
  std::vector<AggregateRow> out;
  if (ok.empty()) return out;
  const std::size_t rows = ok.front()->rows.size();
  for (const auto* r : ok)
    if (r->rows.size() != rows) throw std::logic_error("runs disagree on row count");
  const double k = static_cast<double>(ok.size());
  out.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    MetricsRow& m = out[i].mean;
    m.t = ok.front()->rows[i].t;
    double bits = 0.0;
    for (const auto* r : ok) {
      const MetricsRow& s = r->rows[i];
      m.consensus_err += s.consensus_err;
      m.grad_sq += s.grad_sq;
      m.chi += s.chi;
      m.p_metric += s.p_metric;
      bits += static_cast<double>(s.bits_cum);
    }
    m.consensus_err /= k;
    m.grad_sq /= k;
    m.chi /= k;
    m.p_metric /= k;
    m.bits_cum = std::llround(bits / k);
    out[i].n_seeds = ok.size();
  }
  return out;
}

void write_run_csv(std::ostream& os, const RunResult& run) {
  os << kMetricsHeader;
  if (run.diverged_at) os << ",diverged_at";
  os << '\n';
  for (const auto& r : run.rows) {
    write_row(os, r);
    if (run.diverged_at) os << ',' << *run.diverged_at;
    os << '\n';
  }
  if (run.diverged_at && run.rows.empty()) {
    MetricsRow nan_row;
    nan_row.t = *run.diverged_at;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    nan_row.consensus_err = nan_row.grad_sq = nan_row.chi = nan_row.p_metric = nan;
    write_row(os, nan_row);
    os << ',' << *run.diverged_at << '\n';
  }
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << kMetricsHeader << ",n_seeds\n";
  for (const auto& r : rows) {
    write_row(os, r.mean);
    os << ',' << r.n_seeds << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                std::ostream* warn) {
  cfg.validate();
  // Builds the shared components once up front so configuration errors
  // surface before any thread starts.
  algorithm_for(cfg, mixing_for(cfg));

  ExperimentResult result;
  result.runs.resize(cfg.seeds.size());
  const auto count = static_cast<std::ptrdiff_t>(cfg.seeds.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      result.runs[i] = run_seed(cfg, cfg.seeds[i]);
    } catch (...) {
#pragma omp critical(cmsgd_experiment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  result.aggregate = aggregate_runs(result.runs);
  if (warn) {
    for (const auto& r : result.runs)
      if (r.diverged_at)
        *warn << "warning: seed " << r.seed << " diverged at t=" << *r.diverged_at
              << "; excluded from the aggregate\n";
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (const auto& r : result.runs) {
      auto f = open_out(fs::path(out_dir) / ("seed_" + std::to_string(r.seed) + ".csv"));
      write_run_csv(f, r);
    }
    auto agg = open_out(fs::path(out_dir) / "aggregate.csv");
    write_aggregate_csv(agg, result.aggregate);
    auto conf = open_out(fs::path(out_dir) / "config.txt");
    conf << to_config_text(cfg);
  }
  return result;
}

bool sweepable(const std::string& param) {
  return param == "gamma_g" || param == "T" || param == "eta" || param == "beta" ||
         param == "gamma_x" || param == "compressor";
}

std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const std::string& param,
                              const std::vector<std::string>& values, const std::string& out_dir,
                              std::ostream* warn) {
  if (!sweepable(param)) throw ConfigError("cannot sweep '" + param + "'");
  // Every value is checked before anything runs.
  std::vector<ExperimentConfig> configs;
  for (const auto& v : values) {
    ExperimentConfig c = cfg;
    set_config_value(c, param, v);
    if (param == "eta") c.eta_rule = EtaRule::fixed;
    c.validate();
    configs.push_back(std::move(c));
  }

  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string dir =
        out_dir.empty() ? std::string() : (fs::path(out_dir) / (param + "_" + values[i])).string();
    SweepPoint p;
    p.value = values[i];
    p.result = run_experiment(configs[i], dir, warn);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (p.result.aggregate.empty()) {
      p.final_p_metric = p.final_consensus_err = nan;
      p.bits_cum = p.result.runs.empty() || p.result.runs.front().rows.empty()
                       ? 0.0
                       : static_cast<double>(p.result.runs.front().rows.back().bits_cum);
    } else {
      const MetricsRow& last = p.result.aggregate.back().mean;
      p.final_p_metric = last.p_metric;
      p.final_consensus_err = last.consensus_err;
      p.bits_cum = static_cast<double>(last.bits_cum);
    }
    points.push_back(std::move(p));
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    auto f = open_out(fs::path(out_dir) / "sweep_summary.csv");
    write_sweep_csv(f, points);
  }
  return points;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  os << kSweepHeader << '\n';
  for (const auto& p : points)
    os << p.value << ',' << format_number(p.final_p_metric) << ','
       << format_number(p.final_consensus_err) << ',' << format_number(p.bits_cum) << '\n';
}

}  // namespace cmsgd
