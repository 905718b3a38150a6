// cmsgd: run, sweep and validate CMSGD_1P experiments.
//
// Exit codes: 0 success, 1 configuration error, 2 every seed diverged,
// 3 theorem validation failed (validate-params only).

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cmsgd/config.hpp"
#include "cmsgd/experiment.hpp"
#include "cmsgd/theorem.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kAllDiverged = 2;
constexpr int kTheoremFailed = 3;

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void print_final(const cmsgd::ExperimentResult& res) {
  for (const auto& r : res.runs) {
    std::cout << "seed " << r.seed;
    if (r.diverged_at) {
      std::cout << ": diverged at t=" << *r.diverged_at << '\n';
    } else if (!r.rows.empty()) {
      const auto& last = r.rows.back();
      std::cout << ": t=" << last.t << " p_metric=" << cmsgd::format_number(last.p_metric)
                << " consensus_err=" << cmsgd::format_number(last.consensus_err)
                << " bits_cum=" << last.bits_cum << '\n';
    } else {
      std::cout << ": no rows\n";
    }
  }
}

int cmd_run(const std::string& path, const std::optional<std::uint64_t>& seed,
            const std::optional<std::string>& out) {
  cmsgd::ExperimentConfig cfg = cmsgd::load_config(path);
  if (seed) cfg.seeds = {*seed};
  if (out) cfg.out = *out;
  const auto res = cmsgd::run_experiment(cfg, cfg.out, &std::cerr);
  print_final(res);
  std::cout << "wrote " << cfg.out << "/aggregate.csv (" << res.converged_runs() << " of "
            << res.runs.size() << " seeds)\n";
  return res.converged_runs() == 0 ? kAllDiverged : kOk;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& values,
              const std::optional<std::string>& out) {
  cmsgd::ExperimentConfig cfg = cmsgd::load_config(path);
  if (out) cfg.out = *out;
  const auto points = cmsgd::sweep(cfg, param, split_values(values), cfg.out, &std::cerr);
  cmsgd::write_sweep_csv(std::cout, points);
  if (points.empty()) return kOk;
  for (const auto& p : points)
    if (p.result.converged_runs() > 0) return kOk;
  return kAllDiverged;
}

int cmd_validate(const std::string& path) {
  const cmsgd::ExperimentConfig cfg = cmsgd::load_config(path);
  const cmsgd::TheoremInputs in = cmsgd::theorem_inputs_for(cfg);
  const cmsgd::TheoremConstants k = cmsgd::evaluate_constants(in);
  std::cout << "# constants (conditional on the supplied L_f1, L_f2, gamma1)\n"
            << cmsgd::format_ledger(k) << "\n# theorem 1\n";
  const cmsgd::TheoremReport rep = cmsgd::check_theorem1(k, in);
  std::cout << rep.to_text();
  if (in.T >= 2.0) {
    std::cout << "\n# corollary 1 (gamma_g = T^(-1/8))\n"
              << cmsgd::check_corollary1(in).to_text();
  }
  std::cout << (rep.passed() ? "\nresult: PASS\n" : "\nresult: FAIL\n");
  return rep.passed() ? kOk : kTheoremFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CMSGD_1P simulator"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string param, values;

  auto* run = app.add_subcommand("run", "run every seed of a config");
  run->add_option("--config", config, "config file")->required();
  run->add_option("--seed", seed, "run only this seed");
  run->add_option("--out", out, "output directory");

  auto* sw = app.add_subcommand("sweep", "one experiment per parameter value");
  sw->add_option("--config", config, "config file")->required();
  sw->add_option("--param", param, "gamma_g|T|eta|beta|gamma_x|compressor")->required();
  sw->add_option("--values", values, "comma separated values")->required();
  sw->add_option("--out", out, "output directory");

  auto* val = app.add_subcommand("validate-params", "check the theorem parameter conditions");
  val->add_option("--config", config, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(config, seed, out);
    if (sw->parsed()) return cmd_sweep(config, param, values, out);
    if (val->parsed()) return cmd_validate(config);
  } catch (const cmsgd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const cmsgd::ConnectivityFailure& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
